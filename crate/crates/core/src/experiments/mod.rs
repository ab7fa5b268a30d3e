//! Reproducible harnesses for the finite-N claims: hard edge, exact moment
//! bounds, the GUE coupling, Jacobi islands and the long-time Jacobi law.
//!
//! Every harness is a pure function of its parameters and seed. Trials run
//! on the rayon pool; results are gathered in trial order before any
//! reduction.

mod geometry;
mod jacobi;
mod projections;
mod report;
mod stats;
mod trials;
mod unitary;

pub use geometry::{hausdorff_to_arc, sorted_coupling_distance, ARC_GRID};
pub use jacobi::{
    jacobi_longtime_experiment, jacobi_path_experiment, ATOM_THRESHOLD, ISLAND_RADII,
    JACOBI_BINS, MIN_LONGTIME, SPREAD_BAND,
};
pub use projections::ProjectionPair;
pub use report::{fmt_num, Check, ExperimentReport, Histogram, Table};
pub use stats::{
    kolmogorov_q, ks_distance_to_cdf, ks_two_sample, mean_se, median, percentile, KsResult,
};
pub use trials::{configure_threads, run_trials, SimOptions};
pub use unitary::{
    coupling_experiment, hard_edge_experiment, increment_stationarity_check, moment_table,
    time_reversal_check, weak_moment_experiment, ANGLE_BINS, HARD_EDGE_MARGINS, KS_LEVEL,
    MIN_KS_TRIALS,
};
