//! Spherical codes, and the EQP(d, N) code of region centres.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    cap_fraction, colatitude_for_fraction, polar_to_coords, CartesianPoint, Dimension,
};
use crate::partition::{OffsetScheme, RegionTree};

/// How the colatitude of a collar region's centre is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterMode {
    /// Midpoint of the colatitude interval.
    #[default]
    Midpoint,
    /// Colatitude splitting the collar's area in half.
    AreaMedian,
}

/// Which construction produced a code, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Generator {
    Eqp {
        offset_scheme: OffsetScheme,
        center: CenterMode,
    },
    RandomUniform {
        seed: u64,
    },
    Spiral {
        constant: f64,
    },
    Fibonacci,
    HaltonMapped {
        bases: [u64; 2],
    },
    /// Points read from a file.
    External,
}

impl Generator {
    pub fn name(&self) -> &'static str {
        match self {
            Generator::Eqp { .. } => "eqp",
            Generator::RandomUniform { .. } => "random_uniform",
            Generator::Spiral { .. } => "spiral",
            Generator::Fibonacci => "fibonacci",
            Generator::HaltonMapped { .. } => "halton_mapped",
            Generator::External => "external",
        }
    }

    /// The seed of randomized generators; 0 otherwise.
    pub fn seed(&self) -> u64 {
        match self {
            Generator::RandomUniform { seed } => *seed,
            _ => 0,
        }
    }
}

/// An ordered set of unit vectors in R^{d+1}.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSet {
    d: Dimension,
    points: Vec<CartesianPoint>,
    generator: Generator,
}

impl CodeSet {
    /// Checks that every point has `d + 1` coordinates and unit norm.
    pub fn new(d: Dimension, points: Vec<CartesianPoint>, generator: Generator) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if p.dim() != d {
                return Err(Error::domain(format!(
                    "point {i} has {} coordinates, expected {}",
                    p.coords().len(),
                    d.ambient()
                )));
            }
            p.check_unit()
                .map_err(|e| Error::domain(format!("point {i}: {e}")))?;
        }
        Ok(CodeSet {
            d,
            points,
            generator,
        })
    }

    pub(crate) fn from_parts_unchecked(
        d: Dimension,
        points: Vec<CartesianPoint>,
        generator: Generator,
    ) -> Self {
        CodeSet {
            d,
            points,
            generator,
        }
    }

    pub fn d(&self) -> Dimension {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[CartesianPoint] {
        &self.points
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }
}

/// EQP(d, N): the centre of each region of the partition, in region order.
pub fn eq_points(tree: &RegionTree) -> CodeSet {
    eq_points_with(tree, CenterMode::Midpoint)
}

pub fn eq_points_with(tree: &RegionTree, mode: CenterMode) -> CodeSet {
    let points = center_angles(tree, mode)
        .iter()
        .map(|a| CartesianPoint::from_vec_unchecked(polar_to_coords(a)))
        .collect();
    CodeSet::from_parts_unchecked(
        tree.d(),
        points,
        Generator::Eqp {
            offset_scheme: tree.spec().offset_scheme,
            center: mode,
        },
    )
}

/// Polar angles of the region centres. Caps map to their poles; a collar
/// region takes the centre of its band followed by the centre of its
/// sub-region.
pub fn center_angles(tree: &RegionTree, mode: CenterMode) -> Vec<Vec<f64>> {
    let d = tree.d().get();
    if tree.n() == 1 {
        return vec![vec![0.0; d]];
    }
    if d == 1 {
        return tree
            .regions()
            .iter()
            .map(|r| vec![r.intervals[0].midpoint()])
            .collect();
    }
    let mut out = Vec::with_capacity(tree.n());
    out.push(vec![0.0; d]);
    for collar in tree.collars() {
        let iv = collar.colatitude_interval;
        let theta = match mode {
            CenterMode::Midpoint => iv.midpoint(),
            CenterMode::AreaMedian => {
                let f = 0.5 * (cap_fraction(d, iv.lo) + cap_fraction(d, iv.hi));
                colatitude_for_fraction(d, f)
            }
        };
        for sub in center_angles(&collar.sub, mode) {
            let mut a = Vec::with_capacity(d);
            a.push(theta);
            a.extend_from_slice(&sub);
            if d == 2 && collar.azimuth_offset != 0.0 {
                a[1] = (a[1] + collar.azimuth_offset).rem_euclid(TAU);
            }
            out.push(a);
        }
    }
    let mut south = vec![0.0; d];
    south[0] = PI;
    out.push(south);
    out
}

/// Azimuth offsets of the collars of a partition of S².
pub fn collar_offsets(tree: &RegionTree) -> Result<Vec<f64>> {
    if tree.d().get() != 2 {
        return Err(Error::Unsupported(
            "collar offsets are defined for partitions of S² only".into(),
        ));
    }
    Ok(tree.collars().iter().map(|c| c.azimuth_offset).collect())
}
