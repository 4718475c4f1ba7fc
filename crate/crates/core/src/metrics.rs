//! Quality measures of partitions and spherical codes: region diameters,
//! separation, packing density, covering radius, Riesz and logarithmic
//! energies and spherical-cap discrepancy.
//!
//! Randomized estimators draw from a ChaCha8 stream seeded explicitly, and
//! generate all samples sequentially before any parallel work, so results do
//! not depend on the thread count. Growing the sample count only appends to
//! the stream, which makes the estimates monotone in it.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cap_fraction, chord_to_angle, distance, dot, polar_to_coords};
use crate::partition::{Region, RegionKind, RegionTree};
use crate::points::CodeSet;

/// Version of the metrics report schema.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Default boundary samples per interval edge for diameters in d ≥ 3.
pub const DEFAULT_DIAMETER_SAMPLES: usize = 5;

/// A region diameter with the resolution it was computed at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diameter {
    /// Euclidean chord length.
    pub value: f64,
    /// False when `value` is a sampled lower bound.
    pub exact: bool,
    /// Samples per interval edge used when not exact.
    pub samples_per_edge: usize,
}

/// Largest region diameter of a partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxDiameter {
    pub value: f64,
    /// `value · N^{1/d}`.
    pub ratio: f64,
    pub exact: bool,
    pub samples_per_edge: usize,
}

fn exact(value: f64) -> Diameter {
    Diameter {
        value,
        exact: true,
        samples_per_edge: 0,
    }
}

fn arc_chord(width: f64) -> f64 {
    2.0 * (width.min(PI) / 2.0).sin()
}

/// Diameter of one region. Exact for caps, circle arcs and regions of S²;
/// a lower bound from a boundary sample grid otherwise.
pub fn region_diameter(region: &Region, samples_per_edge: usize) -> Diameter {
    let d = region.dim();
    match region.kind {
        RegionKind::WholeSphere => exact(2.0),
        RegionKind::CapNorth | RegionKind::CapSouth => {
            let radius = region.intervals[0].width();
            exact(if radius <= FRAC_PI_2 {
                2.0 * radius.sin()
            } else {
                2.0
            })
        }
        RegionKind::CircleSegment => exact(arc_chord(region.intervals[0].width())),
        RegionKind::Zonal if d == 2 => exact(rectangle_diameter(
            region.intervals[0].lo,
            region.intervals[0].hi,
            region.intervals[1].width(),
        )),
        RegionKind::Zonal => sampled_diameter(region, samples_per_edge.max(2)),
    }
}

/// Diameter of the colatitude-azimuth rectangle [t1, t2] × [0, width] on S².
///
/// With Δ = min(width, π) and c = cos Δ the squared chord between
/// (a, 0) and (b, Δ) is 2 − 2(cos a cos b + c sin a sin b). Its maximum lies
/// at a corner, at the equator when the band straddles it, or where an edge
/// a = t_i meets the minimum of the sinusoid in b.
fn rectangle_diameter(t1: f64, t2: f64, width: f64) -> f64 {
    let c = width.min(PI).cos();
    let f = |a: f64, b: f64| a.cos() * b.cos() + c * a.sin() * b.sin();
    let mut cols = vec![t1, t2];
    if t1 < FRAC_PI_2 && FRAC_PI_2 < t2 {
        cols.push(FRAC_PI_2);
    }
    let mut best = f64::INFINITY;
    for &a in &cols {
        for &b in &cols {
            best = best.min(f(a, b));
        }
    }
    for &a in &[t1, t2] {
        // cos a cos b + c sin a sin b = R cos(b − α), minimal at b = α + π
        let alpha = (c * a.sin()).atan2(a.cos());
        for b in [alpha + PI, alpha - PI] {
            if t1 < b && b < t2 {
                best = best.min(f(a, b));
            }
        }
    }
    (2.0 - 2.0 * best).max(0.0).sqrt()
}

fn sampled_diameter(region: &Region, s: usize) -> Diameter {
    let d = region.dim();
    let axes: Vec<Vec<f64>> = region
        .intervals
        .iter()
        .enumerate()
        .map(|(k, iv)| {
            let mut v: Vec<f64> = (0..s)
                .map(|i| iv.lo + iv.width() * i as f64 / (s - 1) as f64)
                .collect();
            if k + 1 < d && iv.lo < FRAC_PI_2 && FRAC_PI_2 < iv.hi {
                v.push(FRAC_PI_2);
            }
            v
        })
        .collect();
    let total: usize = axes.iter().map(Vec::len).product();
    let mut pts = Vec::with_capacity(total);
    let mut idx = vec![0usize; d];
    let mut angles = vec![0.0; d];
    for _ in 0..total {
        for k in 0..d {
            angles[k] = axes[k][idx[k]];
        }
        pts.push(polar_to_coords(&angles));
        for k in (0..d).rev() {
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
    let mut best: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.max(distance(&pts[i], &pts[j]));
        }
    }
    Diameter {
        value: best,
        exact: false,
        samples_per_edge: s,
    }
}

/// Largest region diameter, and its ratio to the N^{-1/d} scale.
pub fn max_diameter(tree: &RegionTree, samples_per_edge: usize) -> MaxDiameter {
    let ds: Vec<Diameter> = tree
        .regions()
        .par_iter()
        .map(|r| region_diameter(r, samples_per_edge))
        .collect();
    let value = ds.iter().map(|d| d.value).fold(0.0, f64::max);
    let exact = ds.iter().all(|d| d.exact);
    MaxDiameter {
        value,
        ratio: value * (tree.n() as f64).powf(1.0 / tree.d().get() as f64),
        exact,
        samples_per_edge: if exact { 0 } else { samples_per_edge.max(2) },
    }
}

fn require_pairs(code: &CodeSet) -> Result<()> {
    if code.len() < 2 {
        return Err(Error::domain(format!(
            "need at least 2 points, got {}",
            code.len()
        )));
    }
    Ok(())
}

/// Minimum pairwise distance by scanning all pairs.
pub fn min_distance_brute(code: &CodeSet) -> Result<f64> {
    require_pairs(code)?;
    let p = code.points();
    let best = (0..p.len())
        .into_par_iter()
        .map(|i| {
            p[i + 1..]
                .iter()
                .map(|q| distance(p[i].coords(), q.coords()))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}

/// Minimum pairwise distance. Points are swept in order of their first
/// coordinate and a pair is skipped once the coordinate gap alone exceeds the
/// best distance so far, so the result equals [`min_distance_brute`] exactly.
pub fn min_distance(code: &CodeSet) -> Result<f64> {
    require_pairs(code)?;
    let p = code.points();
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p[a].coords()[0].total_cmp(&p[b].coords()[0]));
    let mut best = f64::INFINITY;
    for (k, &i) in order.iter().enumerate() {
        let xi = p[i].coords();
        for &j in &order[k + 1..] {
            let xj = p[j].coords();
            if xj[0] - xi[0] >= best {
                break;
            }
            best = best.min(distance(xi, xj));
        }
    }
    Ok(best)
}

/// `N · |cap(θ_p)| / ω_d` for caps of half the minimum angular separation.
pub fn packing_density(code: &CodeSet) -> Result<f64> {
    let dmin = min_distance(code)?;
    Ok(packing_density_from(code.d().get(), code.len(), dmin))
}

pub(crate) fn packing_density_from(d: usize, n: usize, dmin: f64) -> f64 {
    let radius = 0.5 * chord_to_angle(dmin);
    (n as f64 * cap_fraction(d, radius)).min(1.0)
}

pub(crate) fn uniform_points(rng: &mut ChaCha8Rng, ambient: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..ambient).map(|_| rng.sample(StandardNormal)).collect();
            let n = crate::geometry::norm(&v);
            if n > 1e-150 {
                break v.into_iter().map(|x| x / n).collect();
            }
        })
        .collect()
}

/// Largest angular distance from `samples` uniform random points to their
/// nearest code point: a lower bound on the covering radius.
pub fn covering_radius(code: &CodeSet, samples: u64, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::domain("covering radius needs at least one sample"));
    }
    if code.is_empty() {
        return Err(Error::domain("covering radius of an empty code"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = uniform_points(&mut rng, code.d().ambient(), samples as usize);
    let pts = code.points();
    // Worst sample: smallest best-dot, ties broken by sample index.
    let (worst_dot, worst) = xs
        .par_iter()
        .enumerate()
        .map(|(k, x)| {
            let best = pts
                .iter()
                .map(|p| dot(x, p.coords()))
                .fold(f64::NEG_INFINITY, f64::max);
            (best, k)
        })
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| if (b.0, b.1) < (a.0, a.1) { b } else { a },
        );
    debug_assert!(worst_dot.is_finite());
    let x = &xs[worst];
    let nearest = pts
        .iter()
        .map(|p| distance(x, p.coords()))
        .fold(f64::INFINITY, f64::min);
    Ok(chord_to_angle(nearest))
}

fn pair_energy<F>(code: &CodeSet, kernel: F) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    require_pairs(code)?;
    let p = code.points();
    let rows: Vec<Result<f64>> = (0..p.len())
        .into_par_iter()
        .map(|i| {
            let mut row = 0.0;
            for (j, q) in p.iter().enumerate().skip(i + 1) {
                let r = distance(p[i].coords(), q.coords());
                if r == 0.0 {
                    return Err(Error::CoincidentPoints {
                        first: i,
                        second: j,
                    });
                }
                row += kernel(r);
            }
            Ok(row)
        })
        .collect();
    let mut total = 0.0;
    for row in rows {
        total += row?;
    }
    let n = p.len() as f64;
    Ok(2.0 * total / (n * n))
}

/// Riesz s-energy (1/N²) Σ_{x≠y} ‖x − y‖^{-s} over ordered pairs.
pub fn riesz_energy(code: &CodeSet, s: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain(format!(
            "Riesz exponent must be positive, got {s}"
        )));
    }
    pair_energy(code, |r| r.powf(-s))
}

/// Logarithmic energy (1/N²) Σ_{x≠y} log(1/‖x − y‖).
pub fn log_energy(code: &CodeSet) -> Result<f64> {
    pair_energy(code, |r| -r.ln())
}

/// Number of code points in the closed cap {x : x·c ≥ cos r}.
pub fn cap_count(code: &CodeSet, center: &[f64], radius: f64) -> usize {
    let threshold = radius.cos();
    code.points()
        .iter()
        .filter(|p| dot(p.coords(), center) >= threshold)
        .count()
}

/// Largest |fraction of points in cap − normalized cap area| over random caps.
/// Every code point is used once as a centre, followed by `trials` uniformly
/// random centres; each cap gets a radius uniform in [0, π].
pub fn cap_discrepancy(code: &CodeSet, trials: u64, seed: u64) -> Result<f64> {
    if code.is_empty() {
        return Err(Error::domain("cap discrepancy of an empty code"));
    }
    let d = code.d().get();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut caps: Vec<(Vec<f64>, f64)> = code
        .points()
        .iter()
        .map(|p| (p.coords().to_vec(), rng.random_range(0.0..=PI)))
        .collect();
    for _ in 0..trials {
        let c = uniform_points(&mut rng, d + 1, 1).pop().unwrap();
        let r = rng.random_range(0.0..=PI);
        caps.push((c, r));
    }
    let n = code.len() as f64;
    let worst = caps
        .par_iter()
        .map(|(c, r)| {
            let frac = cap_count(code, c, *r) as f64 / n;
            (frac - cap_fraction(d, *r)).abs()
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst.clamp(0.0, 1.0))
}

/// Sample sizes and seed for [`metrics_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsConfig {
    pub s_values: Vec<f64>,
    /// Random points for the covering-radius estimate.
    pub mc_samples: u64,
    /// Random caps (beyond the code-point centred ones) for the discrepancy.
    pub cap_trials: u64,
    pub seed: u64,
    pub diameter_samples: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            s_values: vec![1.0],
            mc_samples: 100_000,
            cap_trials: 10_000,
            seed: 0,
            diameter_samples: DEFAULT_DIAMETER_SAMPLES,
        }
    }
}

/// Named scalar metrics of a code and, when known, its partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub generator: String,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub max_region_diameter: Option<f64>,
    pub diameter_ratio: Option<f64>,
    pub diameter_exact: Option<bool>,
    pub min_distance: f64,
    pub min_distance_ratio: f64,
    pub packing_density: f64,
    pub covering_radius_estimate: f64,
    pub riesz_energy: BTreeMap<String, f64>,
    pub log_energy: f64,
    pub cap_discrepancy_estimate: f64,
    pub mc_samples: u64,
    pub cap_trials: u64,
    pub seed: u64,
}

/// Key under which the s-energy is stored in [`MetricsReport::riesz_energy`].
pub fn riesz_key(s: f64) -> String {
    format!("{s}")
}

/// Runs every metric on `code`; diameters need the partition.
pub fn metrics_report(
    code: &CodeSet,
    tree: Option<&RegionTree>,
    config: &MetricsConfig,
) -> Result<MetricsReport> {
    let d = code.d().get();
    let n = code.len();
    if let Some(t) = tree {
        if t.d() != code.d() || t.n() != n {
            return Err(Error::config("partition does not match the code"));
        }
    }
    let scale = (n as f64).powf(1.0 / d as f64);
    let diameter = tree.map(|t| max_diameter(t, config.diameter_samples));
    let dmin = min_distance(code)?;
    let mut riesz = BTreeMap::new();
    for &s in &config.s_values {
        riesz.insert(riesz_key(s), riesz_energy(code, s)?);
    }
    Ok(MetricsReport {
        schema_version: REPORT_SCHEMA_VERSION,
        generator: code.generator().name().to_string(),
        d,
        n,
        max_region_diameter: diameter.map(|m| m.value),
        diameter_ratio: diameter.map(|m| m.ratio),
        diameter_exact: diameter.map(|m| m.exact),
        min_distance: dmin,
        min_distance_ratio: dmin * scale,
        packing_density: packing_density_from(d, n, dmin),
        covering_radius_estimate: covering_radius(code, config.mc_samples, config.seed)?,
        riesz_energy: riesz,
        log_energy: log_energy(code)?,
        cap_discrepancy_estimate: cap_discrepancy(code, config.cap_trials, config.seed)?,
        mc_samples: config.mc_samples,
        cap_trials: config.cap_trials,
        seed: config.seed,
    })
}
