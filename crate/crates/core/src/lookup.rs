//! Point location: which region of EQ(d, N) contains a given point.
//!
//! The search descends the tree: a binary search over the zone boundaries
//! picks a cap or collar, the collar's azimuth rotation is undone, and the
//! search recurses into the collar's sub-partition. Comparisons use the same
//! floating-point values and half-open convention as
//! [`Region::contains_polar`](crate::Region::contains_polar), so the two
//! always agree exactly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{coords_to_polar, CartesianPoint};
use crate::partition::{reduce_azimuth, RegionTree};

/// Index of the region containing `x`.
pub fn lookup(tree: &RegionTree, x: &CartesianPoint) -> Result<usize> {
    if x.dim() != tree.d() {
        return Err(Error::domain(format!(
            "point lives on S^{} but the partition is of S^{}",
            x.dim(),
            tree.d()
        )));
    }
    x.check_unit()?;
    Ok(lookup_polar(tree, &coords_to_polar(x.coords())))
}

/// Index of the region containing the point with the given recursive polar
/// angles. The azimuth must already lie in `[0, 2π]`.
pub fn lookup_polar(tree: &RegionTree, angles: &[f64]) -> usize {
    let n = tree.n();
    if n == 1 {
        return 0;
    }
    if tree.d().get() == 1 {
        let phi = angles[0];
        let regions = tree.regions();
        let i = regions.partition_point(|r| r.intervals[0].lo <= phi);
        return i.saturating_sub(1);
    }
    let theta = angles[0];
    let b = &tree.boundaries;
    if theta < b[0] {
        return 0;
    }
    if theta >= b[b.len() - 1] {
        return n - 1;
    }
    let i = b.partition_point(|&x| x <= theta) - 1;
    let collar = &tree.collars()[i];
    let local = if tree.d().get() == 2 {
        let phi = reduce_azimuth(angles[1], collar.azimuth_offset);
        lookup_polar(&collar.sub, &[phi])
    } else {
        lookup_polar(&collar.sub, &angles[1..])
    };
    collar.first_region + local
}

/// Number of points falling in each region.
pub fn histogram(tree: &RegionTree, xs: &[CartesianPoint]) -> Result<Vec<u64>> {
    let n = tree.n();
    xs.par_chunks(4096)
        .map(|chunk| {
            let mut counts = vec![0u64; n];
            for x in chunk {
                counts[lookup(tree, x)?] += 1;
            }
            Ok(counts)
        })
        .try_reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )
}
