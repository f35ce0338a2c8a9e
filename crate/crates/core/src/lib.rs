//! Bus-stop placement and bus-route planning.
//!
//! Houses are clustered with Gaussian mean shift; the modes become stops.
//! Coverage is scored against the service radius over a sweep of bandwidths,
//! and the stops of the chosen bandwidth are joined into a closed route by an
//! ant colony.

// `!(x > 0.0)` style checks also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod clustering;
pub mod coverage;
pub mod error;
pub mod fixtures;
pub mod geo;
pub mod io;
pub mod pipeline;
pub mod routing;

pub use clustering::{mean_shift, ClusterResult, MeanShiftConfig};
pub use coverage::{assign_nearest, coverage_report, CoverageReport};
pub use error::{Error, Result};
pub use geo::{haversine_distance, project_local, unproject_local, GeoPoint, PlanarPoint};
pub use pipeline::{bandwidth_sweep, plan, PlanResult, SweepReport};
pub use routing::{aco_solve, brute_force_tsp, AcoParams, Tour};
