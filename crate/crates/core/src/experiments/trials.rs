use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rmt_sim::{RngStream, Scheme, DEFAULT_STEP};

/// Integrator settings shared by the simulation harnesses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub step: f64,
    pub scheme: Scheme,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            step: DEFAULT_STEP,
            scheme: Scheme::Geodesic,
        }
    }
}

/// Runs `f(trial, stream)` for every trial, possibly in parallel, and
/// returns the results in trial order. Trial `k` draws from stream `k` of
/// `seed`, so the output does not depend on scheduling.
pub fn run_trials<T, F>(trials: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut RngStream) -> Result<T> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = RngStream::new(seed, k as u64);
            f(k, &mut rng)
        })
        .collect()
}

/// Sizes the global worker pool. Only the first call has an effect.
pub fn configure_threads(threads: usize) -> Result<()> {
    if threads == 0 {
        return Err(Error::domain("thread count must be positive"));
    }
    // a second initialization is harmless; the existing pool is kept
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

pub(crate) fn require_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    Ok(())
}
