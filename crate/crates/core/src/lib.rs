//! Brownian motion on the unitary group: exact finite-N moments through the
//! class-space flow on the symmetric group, the free limit law and its
//! quantiles, seeded matrix simulation, and reproducible experiment harnesses.
//!
//! Module map:
//! - [`symflow`]: partitions, split/merge flow matrices, exact moments.
//! - [`freemeasure`]: the limit law on the circle, the semicircle law, the
//!   GUE pushforward map and the free Jacobi law.
//! - [`rmt_sim`]: GUE and Haar samplers, the unitary Brownian motion
//!   integrator, eigenvalue extraction.
//! - [`experiments`]: harnesses producing [`experiments::ExperimentReport`]s.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod freemeasure;
pub mod quad;
pub mod rmt_sim;
pub mod symflow;

pub use error::{Error, Result};
