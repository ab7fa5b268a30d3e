//! Seeded random matrices: GUE and Haar samplers, the Brownian motion on
//! `U(N)` and eigenvalue extraction.
//!
//! Matrices are dense [`faer::Mat`]s over [`C64`]. Every sampler draws from a
//! caller-owned [`RngStream`], so a trial is a pure function of its
//! `(seed, stream)` pair.

mod ensembles;
mod rng;
mod spectrum;
mod ubm;

pub use ensembles::{gue_bm_increment, haar_unitary, sample_gue, GueSample};
pub use rng::RngStream;
pub use spectrum::{
    eigangles, hermitian_eigenvalues, normalized_trace_powers, unitarity_defect,
};
pub use ubm::{
    expi_hermitian, ubm_coupled_endpoints, ubm_endpoint, ubm_sample_path, ubm_sample_path_with, ubm_step,
    ubm_step_with, Scheme, UnitaryPathSample, DEFAULT_STEP, MAX_STEP, UNITARITY_TOL,
};

/// Complex double, the scalar of every matrix in this module.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix.
pub type CMat = faer::Mat<C64>;
