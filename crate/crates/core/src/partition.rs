//! Recursive zonal equal-area partition EQ(d, N) of S^d.
//!
//! For `N = 1` the single region is the whole sphere and for `d = 1` the
//! circle is cut into `N` equal arcs. Otherwise the sphere is split into two
//! polar caps, each holding one region, and a run of collars between them.
//! Every collar holds an integer number `m` of regions and is itself cut by
//! EQ(d-1, m) applied to its cross-section.
//!
//! Boundary convention: every interval is half open `[lo, hi)` except that an
//! interval ending at π (colatitudes) or 2π (azimuth) is closed, so each point
//! of the sphere lies in exactly one region.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    cap_fraction, colatitude_for_count, sphere_area, sphere_area_raw, Dimension,
};

/// Current version of the serialized tree schema.
pub const TREE_SCHEMA_VERSION: u32 = 1;

/// Default relative tolerance for construction-time area checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Azimuthal rotation applied to the collars of two-dimensional partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OffsetScheme {
    /// All collars start at azimuth 0.
    #[default]
    None,
    /// Adjacent collars are rotated by half their combined point spacing.
    Stagger,
}

/// Parameters of a partition: dimension, region count and construction options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub d: Dimension,
    pub n: usize,
    #[serde(default)]
    pub offset_scheme: OffsetScheme,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

impl PartitionSpec {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        let d = Dimension::new(d)?;
        if n == 0 {
            return Err(Error::domain("region count must be at least 1"));
        }
        Ok(PartitionSpec {
            d,
            n,
            offset_scheme: OffsetScheme::None,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    pub fn with_offsets(mut self, scheme: OffsetScheme) -> Self {
        self.offset_scheme = scheme;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::domain("region count must be at least 1"));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::domain("tolerance must be positive"));
        }
        Ok(())
    }
}

/// A closed-form angular interval `[lo, hi]`; see the module docs for which
/// end is open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Half-open membership, closed at `top`.
    #[inline]
    pub(crate) fn contains(&self, v: f64, top: f64) -> bool {
        self.lo <= v && (v < self.hi || self.hi == top)
    }
}

impl From<[f64; 2]> for Interval {
    fn from(a: [f64; 2]) -> Self {
        Interval::new(a[0], a[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    CapNorth,
    CapSouth,
    Zonal,
    WholeSphere,
    CircleSegment,
}

/// One region: a product of `d` angular intervals, colatitudes first and the
/// azimuth last. The azimuth interval is expressed in the frame of its collar,
/// which is rotated by `azimuth_offset`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub intervals: Vec<Interval>,
    pub kind: RegionKind,
    pub azimuth_offset: f64,
}

/// Reduces an azimuth to the frame of a collar rotated by `offset`.
#[inline]
pub(crate) fn reduce_azimuth(phi: f64, offset: f64) -> f64 {
    if offset == 0.0 {
        phi
    } else {
        (phi - offset).rem_euclid(TAU)
    }
}

impl Region {
    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    /// Area from the product formula: level `k` contributes the normalized
    /// measure of its interval on S^{d-k} relative to S^{d-k-1}.
    pub fn area(&self) -> f64 {
        let d = self.dim();
        let mut area = 1.0;
        for (k, iv) in self.intervals.iter().enumerate() {
            if k + 1 == d {
                area *= iv.width();
            } else {
                let m = d - k;
                let frac = cap_fraction(m, iv.hi) - cap_fraction(m, iv.lo);
                area *= frac * sphere_area_raw(m) / sphere_area_raw(m - 1);
            }
        }
        area
    }

    /// Membership of a point given by recursive polar angles, under the
    /// half-open convention. This is the brute-force oracle the fast lookup
    /// must agree with.
    pub fn contains_polar(&self, angles: &[f64]) -> bool {
        let d = self.dim();
        if angles.len() != d {
            return false;
        }
        for (k, iv) in self.intervals.iter().enumerate() {
            let ok = if k + 1 == d {
                iv.contains(reduce_azimuth(angles[k], self.azimuth_offset), TAU)
            } else {
                iv.contains(angles[k], PI)
            };
            if !ok {
                return false;
            }
        }
        true
    }
}

/// A collar: a colatitude band holding `count` regions, cut by EQ(d-1, count).
#[derive(Debug, Clone, PartialEq)]
pub struct CollarNode {
    pub colatitude_interval: Interval,
    pub count: usize,
    pub sub: Box<RegionTree>,
    /// Rotation of the azimuth frame; nonzero only for collars of S².
    pub azimuth_offset: f64,
    pub(crate) first_region: usize,
}

/// The full partition EQ(d, N).
#[derive(Debug, Clone, PartialEq)]
pub struct RegionTree {
    spec: PartitionSpec,
    cap_colatitude: f64,
    /// Zone boundaries θ_c = b₀ < … < b_n = π − θ_c, one more than collars.
    /// Empty when there are no caps.
    pub(crate) boundaries: Vec<f64>,
    collars: Vec<CollarNode>,
    regions: Vec<Region>,
}

impl RegionTree {
    pub fn spec(&self) -> &PartitionSpec {
        &self.spec
    }

    pub fn d(&self) -> Dimension {
        self.spec.d
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    /// Polar cap radius: π for a single region, 0 when there are no caps
    /// (the circle).
    pub fn cap_colatitude(&self) -> f64 {
        self.cap_colatitude
    }

    pub fn collars(&self) -> &[CollarNode] {
        &self.collars
    }

    /// All regions in order: north cap, collars north to south, south cap.
    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn zone_boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// Region counts of the collars, north to south.
    pub fn collar_counts(&self) -> Vec<usize> {
        self.collars.iter().map(|c| c.count).collect()
    }

    /// Checks every structural invariant of the tree, recursively: region
    /// count, equal areas within `area_tol · ω_d`, interval ordering and
    /// ranges, exact tiling of the collar bands, and the nested sub-partitions.
    pub fn check_invariants(&self, area_tol: f64) -> Result<()> {
        let d = self.d().get();
        let n = self.n();
        let fail = |msg: String| Err(Error::Construction(format!("EQ({d},{n}): {msg}")));
        if self.regions.len() != n {
            return fail(format!("{} regions", self.regions.len()));
        }
        let omega = sphere_area(self.d());
        let ideal = omega / n as f64;
        for (i, r) in self.regions.iter().enumerate() {
            if r.dim() != d {
                return fail(format!("region {i} has {} levels", r.dim()));
            }
            for (k, iv) in r.intervals.iter().enumerate() {
                let top = if k + 1 == d { TAU } else { PI };
                if !(iv.lo <= iv.hi && iv.lo >= 0.0 && iv.hi <= top) {
                    return fail(format!("region {i} level {k} interval {iv:?}"));
                }
            }
            let a = r.area();
            if (a - ideal).abs() > area_tol * omega {
                return fail(format!("region {i} area {a} differs from {ideal}"));
            }
        }
        if d >= 2 && n >= 2 {
            let total: usize = self.collars.iter().map(|c| c.count).sum();
            if total + 2 != n {
                return fail(format!("collar counts sum to {total}"));
            }
            if self.boundaries.len() != self.collars.len() + 1 {
                return fail("boundary list length".into());
            }
            if self.boundaries[0] != self.cap_colatitude {
                return fail("first boundary is not the cap colatitude".into());
            }
            for (i, c) in self.collars.iter().enumerate() {
                let iv = c.colatitude_interval;
                if iv.lo != self.boundaries[i] || iv.hi != self.boundaries[i + 1] || iv.lo >= iv.hi
                {
                    return fail(format!("collar {i} does not tile its band"));
                }
                if c.count == 0 || c.sub.n() != c.count || c.sub.d().get() != d - 1 {
                    return fail(format!("collar {i} sub-partition mismatch"));
                }
                let band = (cap_fraction(d, iv.hi) - cap_fraction(d, iv.lo)) * omega;
                if (band - c.count as f64 * ideal).abs() > area_tol * omega {
                    return fail(format!("collar {i} area {band}"));
                }
                c.sub.check_invariants(area_tol)?;
            }
        }
        Ok(())
    }
}

/// Builds EQ(d, N).
pub fn eq_partition(spec: &PartitionSpec) -> Result<RegionTree> {
    spec.validate()?;
    let tree = build(spec.d, spec.n, spec.offset_scheme, spec.tolerance)?;
    Ok(tree)
}

fn full_interval(level: usize, d: usize) -> Interval {
    if level + 1 == d {
        Interval::new(0.0, TAU)
    } else {
        Interval::new(0.0, PI)
    }
}

fn build(d: Dimension, n: usize, scheme: OffsetScheme, tol: f64) -> Result<RegionTree> {
    let dd = d.get();
    let spec = PartitionSpec {
        d,
        n,
        offset_scheme: scheme,
        tolerance: tol,
    };
    if n == 1 {
        let region = Region {
            intervals: (0..dd).map(|k| full_interval(k, dd)).collect(),
            kind: RegionKind::WholeSphere,
            azimuth_offset: 0.0,
        };
        return Ok(RegionTree {
            spec,
            cap_colatitude: PI,
            boundaries: Vec::new(),
            collars: Vec::new(),
            regions: vec![region],
        });
    }
    if dd == 1 {
        return Ok(RegionTree {
            spec,
            cap_colatitude: 0.0,
            boundaries: Vec::new(),
            collars: Vec::new(),
            regions: circle_segments(n),
        });
    }

    let theta_c = colatitude_for_count(dd, 1, n);
    let n_collars = collar_number(d, n, theta_c);
    let counts = if n_collars == 0 {
        Vec::new()
    } else {
        collar_counts(d, n, theta_c, n_collars)?
    };
    let boundaries = zone_colatitudes(d, n, &counts);
    let offsets = if dd == 2 && scheme == OffsetScheme::Stagger {
        stagger_offsets(&counts)
    } else {
        vec![0.0; counts.len()]
    };

    let omega = sphere_area(d);
    let ideal = omega / n as f64;
    let lower = d.lower().expect("d >= 2");
    let mut collars = Vec::with_capacity(counts.len());
    let mut first_region = 1;
    for (i, (&m, &offset)) in counts.iter().zip(&offsets).enumerate() {
        let iv = Interval::new(boundaries[i], boundaries[i + 1]);
        let band = (cap_fraction(dd, iv.hi) - cap_fraction(dd, iv.lo)) * omega;
        if (band - m as f64 * ideal).abs() > tol * omega {
            return Err(Error::Construction(format!(
                "EQ({dd},{n}) collar {i}: area {band} but {m} regions need {}",
                m as f64 * ideal
            )));
        }
        collars.push(CollarNode {
            colatitude_interval: iv,
            count: m,
            sub: Box::new(build(lower, m, scheme, tol)?),
            azimuth_offset: offset,
            first_region,
        });
        first_region += m;
    }

    let regions = assemble_regions(dd, theta_c, &boundaries, &collars);
    Ok(RegionTree {
        spec,
        cap_colatitude: theta_c,
        boundaries,
        collars,
        regions,
    })
}

fn circle_segments(n: usize) -> Vec<Region> {
    let starts: Vec<f64> = (0..=n)
        .map(|j| match j {
            0 => 0.0,
            j if j == n => TAU,
            j => TAU * j as f64 / n as f64,
        })
        .collect();
    starts
        .windows(2)
        .map(|w| Region {
            intervals: vec![Interval::new(w[0], w[1])],
            kind: RegionKind::CircleSegment,
            azimuth_offset: 0.0,
        })
        .collect()
}

fn assemble_regions(
    d: usize,
    theta_c: f64,
    boundaries: &[f64],
    collars: &[CollarNode],
) -> Vec<Region> {
    let cap = |iv: Interval, kind| Region {
        intervals: std::iter::once(iv)
            .chain((1..d).map(|k| full_interval(k, d)))
            .collect(),
        kind,
        azimuth_offset: 0.0,
    };
    let mut regions = vec![cap(Interval::new(0.0, theta_c), RegionKind::CapNorth)];
    for c in collars {
        for r in c.sub.regions() {
            regions.push(Region {
                intervals: std::iter::once(c.colatitude_interval)
                    .chain(r.intervals.iter().copied())
                    .collect(),
                kind: RegionKind::Zonal,
                azimuth_offset: if d == 2 {
                    c.azimuth_offset
                } else {
                    r.azimuth_offset
                },
            });
        }
    }
    let south = *boundaries.last().expect("at least one boundary");
    regions.push(cap(Interval::new(south, PI), RegionKind::CapSouth));
    regions
}

/// Ideal collar angle (ω_d / N)^{1/d}: the side of a d-cube with the area of
/// one region.
pub fn ideal_collar_angle(d: Dimension, n: usize) -> f64 {
    (sphere_area(d) / n as f64).powf(1.0 / d.get() as f64)
}

/// Number of collars between caps of radius `theta_c`: the ideal count
/// (π − 2θ_c)/θ_I rounded half to even, at least one when N > 2.
pub fn collar_number(d: Dimension, n: usize, theta_c: f64) -> usize {
    if n <= 2 {
        return 0;
    }
    let ideal = (PI - 2.0 * theta_c) / ideal_collar_angle(d, n);
    (ideal.round_ties_even() as usize).max(1)
}

/// Region counts per collar. Collars of equal fitting angle give real-valued
/// ideal counts, which are rounded with the running rounding error carried
/// forward so that the counts sum to N − 2.
pub fn collar_counts(d: Dimension, n: usize, theta_c: f64, n_collars: usize) -> Result<Vec<usize>> {
    if n < 3 || n_collars == 0 {
        return Err(Error::domain(format!(
            "collar counts need N >= 3 and at least one collar (N={n}, collars={n_collars})"
        )));
    }
    let dd = d.get();
    let ideal = ideal_collar_counts(dd, n, theta_c, n_collars);
    let mut carry = 0.0;
    let mut counts = Vec::with_capacity(n_collars);
    for (i, y) in ideal.into_iter().enumerate() {
        let m = (y + carry).round_ties_even();
        carry += y - m;
        if m < 1.0 {
            return Err(Error::Construction(format!(
                "EQ({dd},{n}): collar {i} would hold {m} regions"
            )));
        }
        counts.push(m as usize);
    }
    let total: usize = counts.iter().sum();
    if total != n - 2 {
        return Err(Error::Construction(format!(
            "EQ({dd},{n}): collar counts sum to {total}, expected {}",
            n - 2
        )));
    }
    Ok(counts)
}

/// Ideal (real) region counts of `n_collars` collars of equal angular height.
pub fn ideal_collar_counts(d: usize, n: usize, theta_c: f64, n_collars: usize) -> Vec<f64> {
    let fitting = (PI - 2.0 * theta_c) / n_collars as f64;
    (1..=n_collars)
        .map(|i| {
            let lo = theta_c + (i - 1) as f64 * fitting;
            let hi = (theta_c + i as f64 * fitting).min(PI);
            (cap_fraction(d, hi) - cap_fraction(d, lo)) * n as f64
        })
        .collect()
}

/// Zone boundaries θ₀ = θ_c < θ₁ < … < θ_n = π − θ_c, recomputed from the
/// cumulative counts so that every zone has exactly the area of its regions.
pub fn zone_colatitudes(d: Dimension, n: usize, counts: &[usize]) -> Vec<f64> {
    let dd = d.get();
    let mut cumulative = 1;
    let mut out = Vec::with_capacity(counts.len() + 1);
    out.push(colatitude_for_count(dd, cumulative, n));
    for &m in counts {
        cumulative += m;
        out.push(colatitude_for_count(dd, cumulative, n));
    }
    out
}

/// Azimuth offsets for the collars of S²: each collar is rotated from its
/// northern neighbour by half the combined point spacing, π/2·(1/m_i + 1/m_{i+1}),
/// reduced modulo its own spacing 2π/m_{i+1}.
pub fn stagger_offsets(counts: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(counts.len());
    let mut offset = 0.0;
    for (i, &m) in counts.iter().enumerate() {
        if i > 0 {
            let prev = counts[i - 1] as f64;
            let m = m as f64;
            offset = (offset + FRAC_PI_2 * (1.0 / prev + 1.0 / m)).rem_euclid(TAU / m);
        }
        out.push(offset);
    }
    out
}

// ---------------------------------------------------------------------------
// JSON schema

#[derive(Serialize, Deserialize)]
struct TreeFile {
    schema_version: u32,
    #[serde(flatten)]
    tree: TreeNode,
}

#[derive(Serialize, Deserialize)]
struct TreeNode {
    spec: PartitionSpec,
    cap_colatitude: f64,
    collars: Vec<CollarRecord>,
}

#[derive(Serialize, Deserialize)]
struct CollarRecord {
    interval: Interval,
    count: usize,
    offset: f64,
    sub: TreeNode,
}

impl RegionTree {
    fn to_node(&self) -> TreeNode {
        TreeNode {
            spec: self.spec,
            cap_colatitude: self.cap_colatitude,
            collars: self
                .collars
                .iter()
                .map(|c| CollarRecord {
                    interval: c.colatitude_interval,
                    count: c.count,
                    offset: c.azimuth_offset,
                    sub: c.sub.to_node(),
                })
                .collect(),
        }
    }

    fn from_node(node: TreeNode) -> Result<RegionTree> {
        let spec = node.spec;
        spec.validate()?;
        let d = spec.d.get();
        let n = spec.n;
        let bad = |msg: &str| Error::Construction(format!("serialized EQ({d},{n}): {msg}"));
        if n == 1 || d == 1 {
            if !node.collars.is_empty() {
                return Err(bad("unexpected collars"));
            }
            // These trees carry no free parameters.
            return build(spec.d, n, spec.offset_scheme, spec.tolerance);
        }
        let theta_c = node.cap_colatitude;
        if !(theta_c > 0.0 && theta_c <= FRAC_PI_2 + 1e-12) {
            return Err(bad("cap colatitude out of range"));
        }
        let mut boundaries = vec![theta_c];
        let mut collars = Vec::with_capacity(node.collars.len());
        let mut first_region = 1;
        for rec in node.collars {
            if rec.interval.lo != *boundaries.last().unwrap() || rec.interval.hi <= rec.interval.lo
            {
                return Err(bad("collar bands do not tile"));
            }
            let sub = RegionTree::from_node(rec.sub)?;
            if sub.n() != rec.count || sub.d().get() + 1 != d {
                return Err(bad("collar count does not match its sub-partition"));
            }
            boundaries.push(rec.interval.hi);
            collars.push(CollarNode {
                colatitude_interval: rec.interval,
                count: rec.count,
                sub: Box::new(sub),
                azimuth_offset: rec.offset,
                first_region,
            });
            first_region += rec.count;
        }
        if first_region + 1 != n {
            return Err(bad("collar counts do not sum to N - 2"));
        }
        if *boundaries.last().unwrap() >= PI {
            return Err(bad("south cap is empty"));
        }
        let regions = assemble_regions(d, theta_c, &boundaries, &collars);
        Ok(RegionTree {
            spec,
            cap_colatitude: theta_c,
            boundaries,
            collars,
            regions,
        })
    }

    /// Serializes to the versioned JSON tree schema.
    pub fn to_json(&self) -> Result<String> {
        let file = TreeFile {
            schema_version: TREE_SCHEMA_VERSION,
            tree: self.to_node(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Parses the JSON tree schema, rebuilding the flat region list.
    pub fn from_json(s: &str) -> Result<RegionTree> {
        let file: TreeFile =
            serde_json::from_str(s).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        if file.schema_version != TREE_SCHEMA_VERSION {
            return Err(Error::config(format!(
                "unsupported tree schema version {}",
                file.schema_version
            )));
        }
        RegionTree::from_node(file.tree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(d: usize, n: usize) -> RegionTree {
        eq_partition(&PartitionSpec::new(d, n).unwrap()).unwrap()
    }

    #[test]
    fn single_region_is_whole_sphere() {
        let t = tree(2, 1);
        assert_eq!(t.regions().len(), 1);
        assert_eq!(t.regions()[0].kind, RegionKind::WholeSphere);
        assert!((t.regions()[0].area() - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn circle_segments_are_equal() {
        let t = tree(1, 5);
        assert_eq!(t.regions().len(), 5);
        for r in t.regions() {
            assert_eq!(r.kind, RegionKind::CircleSegment);
            assert!((r.intervals[0].width() - TAU / 5.0).abs() < 1e-15);
        }
        assert_eq!(t.regions()[4].intervals[0].hi, TAU);
    }

    #[test]
    fn two_regions_are_hemispheres() {
        let t = tree(2, 2);
        assert!(t.collars().is_empty());
        assert!((t.cap_colatitude() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(t.regions()[0].kind, RegionKind::CapNorth);
        assert_eq!(t.regions()[1].kind, RegionKind::CapSouth);
        assert_eq!(
            t.regions()[0].intervals[0].hi,
            t.regions()[1].intervals[0].lo
        );
    }

    #[test]
    fn eq_2_33_structure() {
        let t = tree(2, 33);
        assert_eq!(t.regions().len(), 33);
        // Frozen from an independent trace of the construction (scipy quadrature
        // for the cap areas): ideal counts [6.04, 9.46, 9.46, 6.04].
        assert_eq!(t.collar_counts(), vec![6, 9, 10, 6]);
        t.check_invariants(1e-10).unwrap();
        let b = t.zone_boundaries();
        for (i, m) in t.collar_counts().into_iter().enumerate() {
            let a = 4.0 * PI * (cap_fraction(2, b[i + 1]) - cap_fraction(2, b[i]));
            assert!((a - m as f64 * 4.0 * PI / 33.0).abs() < 1e-10);
        }
    }

    #[test]
    fn eq_3_99_structure() {
        let t = tree(3, 99);
        assert_eq!(t.collar_counts(), vec![15, 34, 33, 15]);
        t.check_invariants(1e-10).unwrap();
    }

    #[test]
    fn ideal_angles() {
        let d2 = Dimension::new(2).unwrap();
        let d3 = Dimension::new(3).unwrap();
        assert!((ideal_collar_angle(d2, 400) - 0.177_245_385_090_551_6).abs() < 1e-15);
        assert!((ideal_collar_angle(d3, 99) - 0.584_204_433_940_917_8).abs() < 1e-14);
        let mut prev = f64::INFINITY;
        for n in 3..500 {
            let a = ideal_collar_angle(d2, n);
            assert!(a < prev);
            prev = a;
        }
    }

    #[test]
    fn boundaries_reflect() {
        for (d, n) in [(2, 33), (3, 99), (4, 64), (2, 400)] {
            let t = tree(d, n);
            let b = t.zone_boundaries();
            let theta_c =
                crate::geometry::cap_colatitude(t.d(), sphere_area(t.d()) / n as f64).unwrap();
            assert!((b[0] - theta_c).abs() < 1e-15);
            assert_eq!(*b.last().unwrap(), PI - b[0]);
            assert!(b.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn collar_counts_conserve_and_track_ideal() {
        for d in 2..=4 {
            let dim = Dimension::new(d).unwrap();
            for n in 3..=2000 {
                let theta_c = colatitude_for_count(d, 1, n);
                let k = collar_number(dim, n, theta_c);
                let counts = collar_counts(dim, n, theta_c, k).unwrap();
                assert_eq!(counts.iter().sum::<usize>(), n - 2, "d={d} n={n}");
                let ideal = ideal_collar_counts(d, n, theta_c, k);
                let mut prefix = 0.0;
                for (m, y) in counts.iter().zip(&ideal) {
                    assert!(*m >= 1);
                    assert!((*m as f64 - y).abs() < 1.0, "d={d} n={n}");
                    prefix += y - *m as f64;
                    assert!(prefix.abs() < 1.0);
                }
                let mut reversed = counts.clone();
                reversed.reverse();
                let mut a = counts.clone();
                a.sort_unstable();
                reversed.sort_unstable();
                assert_eq!(a, reversed);
            }
        }
    }

    #[test]
    fn collar_counts_domain() {
        let d2 = Dimension::new(2).unwrap();
        assert!(collar_counts(d2, 2, FRAC_PI_2, 1).is_err());
        assert!(collar_counts(d2, 10, 0.6, 0).is_err());
        // far too many collars forces empty ones
        assert!(matches!(
            collar_counts(d2, 10, 0.6, 9),
            Err(Error::Construction(_))
        ));
    }

    #[test]
    fn stagger_equal_collars() {
        let off = stagger_offsets(&[4, 4]);
        assert_eq!(off[0], 0.0);
        assert!((off[1] - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn no_offsets_by_default() {
        let t = tree(2, 33);
        assert!(t.collars().iter().all(|c| c.azimuth_offset == 0.0));
        let s = eq_partition(
            &PartitionSpec::new(2, 33)
                .unwrap()
                .with_offsets(OffsetScheme::Stagger),
        )
        .unwrap();
        assert!(s.collars().iter().skip(1).any(|c| c.azimuth_offset != 0.0));
        s.check_invariants(1e-10).unwrap();
    }

    #[test]
    fn json_round_trip() {
        for (d, n, scheme) in [
            (2, 33, OffsetScheme::Stagger),
            (3, 99, OffsetScheme::None),
            (1, 7, OffsetScheme::None),
            (2, 1, OffsetScheme::None),
            (2, 2, OffsetScheme::None),
        ] {
            let t = eq_partition(&PartitionSpec::new(d, n).unwrap().with_offsets(scheme)).unwrap();
            let back = RegionTree::from_json(&t.to_json().unwrap()).unwrap();
            assert_eq!(t, back);
        }
    }

    #[test]
    fn json_rejects_tampering() {
        let t = tree(2, 10);
        let mut v: serde_json::Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        v["collars"][0]["count"] = 5.into();
        assert!(RegionTree::from_json(&v.to_string()).is_err());
        let mut v: serde_json::Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        v["schema_version"] = 99.into();
        assert!(RegionTree::from_json(&v.to_string()).is_err());
        assert!(matches!(
            RegionTree::from_json("{\n oops"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn spec_validation() {
        assert!(PartitionSpec::new(0, 5).is_err());
        assert!(PartitionSpec::new(2, 0).is_err());
        let bad = PartitionSpec::new(2, 5).unwrap().with_tolerance(-1.0);
        assert!(eq_partition(&bad).is_err());
    }
}
