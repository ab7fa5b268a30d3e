//! Exact moments of Brownian motion on `U(N)` from the split/merge flow on
//! conjugacy classes of the symmetric group.
//!
//! The flow `exp(-t(L + D/N^2))` commutes with conjugation, and evaluating at
//! the identity matrix assigns weight one to every permutation, so everything
//! can be done on partitions of `n` (77 classes at `n = 12`) instead of the
//! full group algebra.

mod expm;
mod flow;
mod moments;
mod partition;

pub use expm::{flow_exp_series, flow_exp_squaring, flow_total, Coupling};
pub use flow::{build_flow_matrices, oracle_flow_column, FlowMatrices, MAX_FLOW_N, MAX_ORACLE_N};
pub use moments::{
    check_cauchy_bound, check_moment_bound, finite_n_moment, free_moment, BoundCheck, BOUND_SLACK,
};
pub use partition::{cycle_type, partitions, ClassVector, Partition, MAX_PARTITION_N};
