//! Recursive zonal equal-area partitions of the unit sphere S^d.
//!
//! [`eq_partition`] splits S^d into N regions of equal area and small
//! diameter; [`eq_points`] places one point at the centre of each region;
//! [`lookup`] finds the region containing a point. The [`metrics`] and
//! [`compare`] modules measure point sets against each other.
//!
//! ```
//! use eqsphere::{eq_partition, eq_points, lookup, PartitionSpec};
//!
//! let tree = eq_partition(&PartitionSpec::new(2, 33)?)?;
//! let code = eq_points(&tree);
//! assert_eq!(code.len(), 33);
//! assert_eq!(lookup(&tree, &code.points()[5])?, 5);
//! # Ok::<(), eqsphere::Error>(())
//! ```

pub mod compare;
pub mod error;
pub mod export;
pub mod geometry;
pub mod lookup;
pub mod metrics;
pub mod partition;
pub mod points;

pub use compare::{compare, generate, CompareOptions, CompareTable, GeneratorKind, Metric};
pub use error::{Error, Result};
pub use geometry::{
    cap_area, cap_colatitude, from_cartesian, sphere_area, to_cartesian, CartesianPoint, Dimension,
    PolarPoint,
};
pub use lookup::{histogram, lookup};
pub use metrics::{metrics_report, MetricsConfig, MetricsReport};
pub use partition::{
    eq_partition, CollarNode, Interval, OffsetScheme, PartitionSpec, Region, RegionKind, RegionTree,
};
pub use points::{eq_points, CenterMode, CodeSet, Generator};
