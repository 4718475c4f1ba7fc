//! Alternative point constructions and side-by-side metric tables.

use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CartesianPoint, Dimension};
use crate::metrics::{self, uniform_points};
use crate::partition::{eq_partition, OffsetScheme, PartitionSpec};
use crate::points::{eq_points, CodeSet, Generator};

/// Step constant of the generalized spiral.
pub const SPIRAL_CONSTANT: f64 = 3.6;

/// Default Halton bases.
pub const HALTON_BASES: [u64; 2] = [2, 3];

/// Golden ratio conjugate (√5 − 1)/2.
const GOLDEN_CONJUGATE: f64 = 0.618_033_988_749_894_9;

/// Point on S² from height z ∈ [−1, 1] along the polar axis and azimuth φ.
fn from_height(z: f64, phi: f64) -> CartesianPoint {
    let r = (1.0 - z * z).max(0.0).sqrt();
    CartesianPoint::from_vec_unchecked(vec![z, r * phi.cos(), r * phi.sin()])
}

fn s2() -> Dimension {
    Dimension::new(2).expect("2 is a valid dimension")
}

/// N independent uniform points: normalized Gaussian vectors.
pub fn random_uniform(d: Dimension, n: usize, seed: u64) -> CodeSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = uniform_points(&mut rng, d.ambient(), n)
        .into_iter()
        .map(CartesianPoint::from_vec_unchecked)
        .collect();
    CodeSet::from_parts_unchecked(d, points, Generator::RandomUniform { seed })
}

/// Generalized spiral on S² with heights z_k = 1 − (2k − 1)/N and azimuth
/// steps C/√(N(1 − z_k²)).
pub fn spiral_points(n: usize) -> Result<CodeSet> {
    spiral_points_with(n, SPIRAL_CONSTANT)
}

pub fn spiral_points_with(n: usize, constant: f64) -> Result<CodeSet> {
    if n < 2 {
        return Err(Error::domain("the spiral needs at least 2 points"));
    }
    let nf = n as f64;
    let mut phi: f64 = 0.0;
    let points = (1..=n)
        .map(|k| {
            let z = 1.0 - (2 * k - 1) as f64 / nf;
            if k > 1 {
                phi = (phi + constant / (nf * (1.0 - z * z)).sqrt()).rem_euclid(TAU);
            }
            from_height(z, phi)
        })
        .collect();
    Ok(CodeSet::from_parts_unchecked(
        s2(),
        points,
        Generator::Spiral { constant },
    ))
}

/// Spherical Fibonacci lattice: z_k = 1 − (2k + 1)/N, φ_k = 2πk/Φ.
pub fn fibonacci_points(n: usize) -> Result<CodeSet> {
    if n < 1 {
        return Err(Error::domain(
            "the Fibonacci lattice needs at least 1 point",
        ));
    }
    let nf = n as f64;
    let points = (0..n)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / nf;
            // keep the product small before scaling to avoid losing bits
            let turns = (k as f64 * GOLDEN_CONJUGATE).fract();
            from_height(z, TAU * turns)
        })
        .collect();
    Ok(CodeSet::from_parts_unchecked(
        s2(),
        points,
        Generator::Fibonacci,
    ))
}

/// Van der Corput radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|k| k * k <= p).all(|k| p % k != 0)
}

/// Halton points (indices 1..=N) mapped to S² by z = 1 − 2u, φ = 2πv, which
/// preserves area.
pub fn halton_mapped(n: usize, bases: [u64; 2]) -> Result<CodeSet> {
    if !bases.iter().all(|&b| is_prime(b)) || bases[0] == bases[1] {
        return Err(Error::config(format!(
            "Halton bases must be two distinct primes, got {bases:?}"
        )));
    }
    let points = (1..=n as u64)
        .map(|i| {
            let u = radical_inverse(i, bases[0]);
            let v = radical_inverse(i, bases[1]);
            from_height(1.0 - 2.0 * u, TAU * v)
        })
        .collect();
    Ok(CodeSet::from_parts_unchecked(
        s2(),
        points,
        Generator::HaltonMapped { bases },
    ))
}

/// A point construction selectable in comparisons and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Eqp,
    RandomUniform,
    Spiral,
    Fibonacci,
    HaltonMapped,
}

impl GeneratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::Eqp => "eqp",
            GeneratorKind::RandomUniform => "random_uniform",
            GeneratorKind::Spiral => "spiral",
            GeneratorKind::Fibonacci => "fibonacci",
            GeneratorKind::HaltonMapped => "halton_mapped",
        }
    }

    pub fn supports(&self, d: Dimension) -> bool {
        matches!(self, GeneratorKind::Eqp | GeneratorKind::RandomUniform) || d.get() == 2
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "eqp" => GeneratorKind::Eqp,
            "random" | "random_uniform" => GeneratorKind::RandomUniform,
            "spiral" => GeneratorKind::Spiral,
            "fibonacci" => GeneratorKind::Fibonacci,
            "halton" | "halton_mapped" => GeneratorKind::HaltonMapped,
            other => return Err(Error::config(format!("unknown generator '{other}'"))),
        })
    }
}

/// Builds the code of `kind` with default parameters.
pub fn generate(
    kind: GeneratorKind,
    d: Dimension,
    n: usize,
    seed: u64,
    offsets: OffsetScheme,
) -> Result<CodeSet> {
    if !kind.supports(d) {
        return Err(Error::config(format!(
            "generator {} is defined on S² only, not S^{d}",
            kind.name()
        )));
    }
    if n == 0 {
        return Err(Error::domain("point count must be at least 1"));
    }
    match kind {
        GeneratorKind::Eqp => {
            let spec = PartitionSpec::new(d.get(), n)?.with_offsets(offsets);
            Ok(eq_points(&eq_partition(&spec)?))
        }
        GeneratorKind::RandomUniform => Ok(random_uniform(d, n, seed)),
        GeneratorKind::Spiral => spiral_points(n),
        GeneratorKind::Fibonacci => fibonacci_points(n),
        GeneratorKind::HaltonMapped => halton_mapped(n, HALTON_BASES),
    }
}

/// A metric that can appear in a comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MinDistance,
    MinDistanceRatio,
    PackingDensity,
    CoveringRadius,
    RieszEnergy(f64),
    LogEnergy,
    CapDiscrepancy,
    MaxDiameter,
    DiameterRatio,
}

impl Metric {
    pub fn label(&self) -> String {
        match self {
            Metric::MinDistance => "min_distance".into(),
            Metric::MinDistanceRatio => "min_distance_ratio".into(),
            Metric::PackingDensity => "packing_density".into(),
            Metric::CoveringRadius => "covering_radius".into(),
            Metric::RieszEnergy(s) => format!("riesz_energy_s{s}"),
            Metric::LogEnergy => "log_energy".into(),
            Metric::CapDiscrepancy => "cap_discrepancy".into(),
            Metric::MaxDiameter => "max_diameter".into(),
            Metric::DiameterRatio => "diameter_ratio".into(),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "min_distance" => Metric::MinDistance,
            "min_distance_ratio" => Metric::MinDistanceRatio,
            "packing_density" => Metric::PackingDensity,
            "covering_radius" => Metric::CoveringRadius,
            "log_energy" => Metric::LogEnergy,
            "cap_discrepancy" => Metric::CapDiscrepancy,
            "max_diameter" => Metric::MaxDiameter,
            "diameter_ratio" => Metric::DiameterRatio,
            other => {
                let s = other
                    .strip_prefix("riesz_energy_s")
                    .or_else(|| other.strip_prefix("riesz:"))
                    .ok_or_else(|| Error::config(format!("unknown metric '{other}'")))?;
                Metric::RieszEnergy(
                    s.parse()
                        .map_err(|_| Error::config(format!("bad Riesz exponent in '{other}'")))?,
                )
            }
        })
    }
}

/// Sample sizes for the randomized metrics in a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    pub mc_samples: u64,
    pub cap_trials: u64,
    pub offsets: OffsetScheme,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            mc_samples: 100_000,
            cap_trials: 10_000,
            offsets: OffsetScheme::None,
        }
    }
}

/// One row of the long-form comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub generator: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub metric: String,
    pub value: f64,
    pub seed: u64,
}

/// Long-form comparison table over generators × N × metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareTable {
    pub schema_version: u32,
    pub d: usize,
    pub rows: Vec<CompareRow>,
}

/// Column order of the CSV form of [`CompareTable`].
pub const COMPARE_COLUMNS: [&str; 5] = ["generator", "N", "metric", "value", "seed"];

/// Evaluates every metric for every generator at every N. Cells are
/// independent and computed in parallel; rows come out ordered by generator,
/// then N, then metric, as requested.
pub fn compare(
    d: Dimension,
    generators: &[GeneratorKind],
    n_sweep: &[usize],
    metrics_list: &[Metric],
    seed: u64,
    options: &CompareOptions,
) -> Result<CompareTable> {
    for g in generators {
        if !g.supports(d) {
            return Err(Error::config(format!(
                "generator {} is defined on S² only, not S^{d}",
                g.name()
            )));
        }
        let wants_partition = metrics_list
            .iter()
            .any(|m| matches!(m, Metric::MaxDiameter | Metric::DiameterRatio));
        if wants_partition && *g != GeneratorKind::Eqp {
            return Err(Error::config(format!(
                "region diameters are only defined for eqp, not {}",
                g.name()
            )));
        }
    }
    let cells: Vec<(GeneratorKind, usize)> = generators
        .iter()
        .flat_map(|&g| n_sweep.iter().map(move |&n| (g, n)))
        .collect();
    let blocks: Vec<Result<Vec<CompareRow>>> = cells
        .par_iter()
        .map(|&(g, n)| cell_rows(d, g, n, metrics_list, seed, options))
        .collect();
    let mut rows = Vec::with_capacity(cells.len() * metrics_list.len());
    for b in blocks {
        rows.extend(b?);
    }
    Ok(CompareTable {
        schema_version: 1,
        d: d.get(),
        rows,
    })
}

fn cell_rows(
    d: Dimension,
    g: GeneratorKind,
    n: usize,
    metrics_list: &[Metric],
    seed: u64,
    options: &CompareOptions,
) -> Result<Vec<CompareRow>> {
    let code = generate(g, d, n, seed, options.offsets)?;
    let tree = if g == GeneratorKind::Eqp {
        Some(eq_partition(
            &PartitionSpec::new(d.get(), n)?.with_offsets(options.offsets),
        )?)
    } else {
        None
    };
    let scale = (n as f64).powf(1.0 / d.get() as f64);
    metrics_list
        .iter()
        .map(|m| {
            let value = match *m {
                Metric::MinDistance => metrics::min_distance(&code)?,
                Metric::MinDistanceRatio => metrics::min_distance(&code)? * scale,
                Metric::PackingDensity => metrics::packing_density(&code)?,
                Metric::CoveringRadius => {
                    metrics::covering_radius(&code, options.mc_samples, seed)?
                }
                Metric::RieszEnergy(s) => metrics::riesz_energy(&code, s)?,
                Metric::LogEnergy => metrics::log_energy(&code)?,
                Metric::CapDiscrepancy => {
                    metrics::cap_discrepancy(&code, options.cap_trials, seed)?
                }
                Metric::MaxDiameter | Metric::DiameterRatio => {
                    let md = metrics::max_diameter(
                        tree.as_ref().expect("checked above"),
                        metrics::DEFAULT_DIAMETER_SAMPLES,
                    );
                    if *m == Metric::MaxDiameter {
                        md.value
                    } else {
                        md.ratio
                    }
                }
            };
            Ok(CompareRow {
                generator: g.name().to_string(),
                n,
                metric: m.label(),
                value,
                seed,
            })
        })
        .collect()
}
