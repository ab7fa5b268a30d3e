use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::expm::{flow_total, Coupling};
use super::flow::{build_flow_matrices, MAX_FLOW_N};
use super::partition::Partition;

/// Slack added to the right-hand side of the exact bounds to absorb roundoff.
pub const BOUND_SLACK: f64 = 1e-9;

fn validate(n: usize, t: f64) -> Result<()> {
    if n == 0 || n > MAX_FLOW_N {
        return Err(Error::Size(format!("moment order n = {n} outside 1..={MAX_FLOW_N}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("time must be finite and nonnegative, got {t}")));
    }
    Ok(())
}

fn cycle_moment(n: usize, coupling: Coupling, t: f64) -> Result<f64> {
    validate(n, t)?;
    let flow = build_flow_matrices(n)?;
    let source = flow
        .index_of(&Partition::cycle(n))
        .expect("the n-cycle is a partition of n");
    let total = flow_total(&flow, coupling, t, source)?;
    Ok((-(n as f64) * t / 2.0).exp() * total)
}

/// `E tr[(U_t^N)^n]` for Brownian motion on `U(N)` started at the identity,
/// with `tr` the normalized trace.
pub fn finite_n_moment(n: usize, dim: u64, t: f64) -> Result<f64> {
    if dim == 0 {
        return Err(Error::domain("matrix dimension N must be at least 1"));
    }
    cycle_moment(n, Coupling::Finite(dim), t)
}

/// The `n`-th moment of the limit law on the circle, `lim_N E tr[(U_t^N)^n]`.
pub fn free_moment(n: usize, t: f64) -> Result<f64> {
    cycle_moment(n, Coupling::Free, t)
}

/// Outcome of checking `lhs <= rhs + BOUND_SLACK`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub n: usize,
    pub dim: u64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl BoundCheck {
    fn new(n: usize, dim: u64, t: f64, lhs: f64, rhs: f64) -> Self {
        BoundCheck {
            n,
            dim,
            t,
            lhs,
            rhs,
            pass: lhs <= rhs + BOUND_SLACK,
        }
    }

    /// `rhs + slack - lhs`; nonnegative exactly when the check passes.
    pub fn margin(&self) -> f64 {
        self.rhs + BOUND_SLACK - self.lhs
    }
}

/// `|E tr U^n - limit| <= t^2 n^4 / N^2`.
pub fn check_moment_bound(n: usize, dim: u64, t: f64) -> Result<BoundCheck> {
    let lhs = (finite_n_moment(n, dim, t)? - free_moment(n, t)?).abs();
    let rhs = t * t * (n as f64).powi(4) / (dim as f64).powi(2);
    Ok(BoundCheck::new(n, dim, t, lhs, rhs))
}

/// `|E tr U_N^n - E tr U_2N^n| <= 3 t^2 n^4 / (4 N^2)`.
pub fn check_cauchy_bound(n: usize, dim: u64, t: f64) -> Result<BoundCheck> {
    let lhs = (finite_n_moment(n, dim, t)? - finite_n_moment(n, 2 * dim, t)?).abs();
    let rhs = 0.75 * t * t * (n as f64).powi(4) / (dim as f64).powi(2);
    Ok(BoundCheck::new(n, dim, t, lhs, rhs))
}
