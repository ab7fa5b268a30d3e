use faer::Mat;

use super::projections::ProjectionPair;
use super::report::{ExperimentReport, Histogram};
use super::stats::ks_distance_to_cdf;
use super::trials::{require_trials, run_trials, SimOptions};
use crate::error::{Error, Result};
use crate::freemeasure::FreeJacobiLaw;
use crate::rmt_sim::{haar_unitary, hermitian_eigenvalues, ubm_endpoint, ubm_sample_path_with, CMat};

pub const JACOBI_BINS: usize = 1000;
pub const ISLAND_RADII: [f64; 2] = [0.05, 0.1];
pub const SPREAD_BAND: (f64, f64) = (0.3, 0.7);
/// Eigenvalues closer than this to 0 or 1 are counted as atoms.
pub const ATOM_THRESHOLD: f64 = 1e-6;
pub const MIN_LONGTIME: f64 = 16.0;
const RANGE_SLACK: f64 = 1e-10;

// Spectrum of Q U* P U Q restricted to the range of Q, given an orthonormal
// basis of that range.
fn compressed_spectrum(p: &CMat, basis: &CMat, u: &CMat) -> Result<Vec<f64>> {
    let m = u * basis;
    let b = m.adjoint() * (p * &m);
    // symmetrize rounding noise before the Hermitian solver
    let k = b.nrows();
    let h = Mat::from_fn(k, k, |i, j| (b[(i, j)] + b[(j, i)].conj()) * 0.5);
    hermitian_eigenvalues(&h)
}

fn distinct_values(sorted: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &x in sorted {
        if out.last().is_none_or(|&l| x - l > 1e-9) {
            out.push(x);
        }
    }
    out
}

fn gap_to(set: &[f64], x: f64) -> f64 {
    set.iter().map(|&c| (x - c).abs()).fold(f64::INFINITY, f64::min)
}

/// Eigenvalues of `J_t = Q U_t* P U_t Q` for the amplified pair
/// `(P (x) I_N, Q (x) I_N)` along one Brownian path per trial.
///
/// The kernel of `Q` contributes exact zeros that are counted but kept out
/// of the histograms and island statistics.
pub fn jacobi_path_experiment(
    small: &ProjectionPair,
    n_blocks: usize,
    times: &[f64],
    trials: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<ExperimentReport> {
    require_trials(trials)?;
    if n_blocks == 0 {
        return Err(Error::Size("block count must be at least 1".into()));
    }
    if times.is_empty() || times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::domain("times must be a nonempty list of nonnegative numbers"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::contract("times must be sorted ascending"));
    }
    let big = small.amplify(n_blocks);
    let basis = big.range_basis_q()?;
    let dim = big.n;
    let zero_block = dim - basis.ncols();

    let initial = compressed_spectrum(&big.p, &basis, &Mat::identity(dim, dim))?;
    let islands = distinct_values(&initial);

    let spectra = run_trials(trials, seed, |_, rng| {
        let path = ubm_sample_path_with(dim, times, opts.step, opts.scheme, rng)?;
        path.matrices
            .iter()
            .map(|u| compressed_spectrum(&big.p, &basis, u))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut r = ExperimentReport::new("jacobi_path");
    r.param("k", small.n as u64)
        .param("N", n_blocks as u64)
        .param("dimension", dim as u64)
        .param("t_list", times.to_vec())
        .param("trials", trials as u64)
        .param("seed", seed)
        .param("step", opts.step)
        .param("scheme", opts.scheme.name());
    r.stat("zero_block_size", zero_block as f64)
        .stat("nonzero_block_size", basis.ncols() as f64);
    for (k, c) in islands.iter().enumerate() {
        r.stat(&format!("initial_value_{k}"), *c);
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (ti, &t) in times.iter().enumerate() {
        let key = format!("t={t}");
        let mut hist = Histogram::new(0.0, 1.0, JACOBI_BINS)?;
        let mut near = [0usize; 2];
        let mut all_near = [0usize; 2];
        let mut banded = 0usize;
        let mut total = 0usize;
        for trial in &spectra {
            let ev = &trial[ti];
            hist.extend(ev);
            total += ev.len();
            for (j, &d) in ISLAND_RADII.iter().enumerate() {
                let c = ev.iter().filter(|&&x| gap_to(&islands, x) <= d).count();
                near[j] += c;
                all_near[j] += (c == ev.len()) as usize;
            }
            banded += ev.iter().any(|&x| x >= SPREAD_BAND.0 && x <= SPREAD_BAND.1) as usize;
            for &x in ev {
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        for (j, d) in ISLAND_RADII.iter().enumerate() {
            r.stat(&format!("{key}/fraction_within_{d}"), near[j] as f64 / total as f64)
                .stat(
                    &format!("{key}/trials_all_within_{d}"),
                    all_near[j] as f64 / trials as f64,
                );
        }
        r.stat(&format!("{key}/trials_band_nonempty"), banded as f64 / trials as f64);
        r.histograms.insert(key, hist);
    }
    r.stat("min_eigenvalue", lo).stat("max_eigenvalue", hi);
    r.check(
        "eigenvalues_in_unit_interval",
        RANGE_SLACK - (-lo).max(hi - 1.0).max(0.0),
    );
    Ok(r)
}

fn rank_of(frac: f64, n: usize, name: &str) -> Result<usize> {
    let r = frac * n as f64;
    if !(frac > 0.0 && frac < 1.0) || (r - r.round()).abs() > 1e-9 {
        return Err(Error::contract(format!(
            "{name} * N = {r} must be an integer with 0 < {name} < 1"
        )));
    }
    Ok(r.round() as usize)
}

/// Empirical law of `Q U* P U Q` for coordinate projections of traces
/// `alpha`, `beta`, with `U` either `U_{t_large}` or exactly Haar, against the
/// free Jacobi law.
///
/// Eigenvalues within [`ATOM_THRESHOLD`] of 0 or 1 are snapped to the atom
/// before the KS distance is taken, since numerically they are never exact.
#[allow(clippy::too_many_arguments)]
pub fn jacobi_longtime_experiment(
    alpha: f64,
    beta: f64,
    n: usize,
    t_large: f64,
    trials: usize,
    seed: u64,
    haar: bool,
    opts: &SimOptions,
) -> Result<ExperimentReport> {
    require_trials(trials)?;
    let rank_p = rank_of(alpha, n, "alpha")?;
    let rank_q = rank_of(beta, n, "beta")?;
    if !haar && !(t_large >= MIN_LONGTIME && t_large.is_finite()) {
        return Err(Error::domain(format!(
            "long-time run needs t >= {MIN_LONGTIME}, got {t_large}"
        )));
    }
    let law = FreeJacobiLaw::new(alpha, beta)?;
    let pair = ProjectionPair::diagonal(n, rank_p, rank_q)?;
    let basis = pair.range_basis_q()?;
    let spectra = run_trials(trials, seed, |_, rng| {
        let u = if haar {
            haar_unitary(n, rng)?
        } else {
            ubm_endpoint(n, t_large, opts.step, opts.scheme, rng)?
        };
        let mut ev = compressed_spectrum(&pair.p, &basis, &u)?;
        ev.extend(std::iter::repeat_n(0.0, n - rank_q));
        Ok(ev)
    })?;

    let mut values: Vec<f64> = Vec::with_capacity(trials * n);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for ev in &spectra {
        for &x in ev {
            lo = lo.min(x);
            hi = hi.max(x);
            values.push(if x < ATOM_THRESHOLD {
                0.0
            } else if x > 1.0 - ATOM_THRESHOLD {
                1.0
            } else {
                x
            });
        }
    }
    let total = values.len() as f64;
    let atom0 = values.iter().filter(|&&x| x == 0.0).count() as f64 / total;
    let atom1 = values.iter().filter(|&&x| x == 1.0).count() as f64 / total;
    let ks = ks_distance_to_cdf(&values, |x| law.cdf(x), |x| law.cdf_left(x))?;

    let mut r = ExperimentReport::new("jacobi_longtime");
    r.param("alpha", alpha)
        .param("beta", beta)
        .param("N", n as u64)
        .param("t", if haar { serde_json::Value::Null } else { t_large.into() })
        .param("haar", haar)
        .param("trials", trials as u64)
        .param("seed", seed)
        .param("step", opts.step)
        .param("scheme", opts.scheme.name());
    r.stat("ks_distance", ks)
        .stat("atom0_estimate", atom0)
        .stat("atom1_estimate", atom1)
        .stat("atom0_exact", law.atom0)
        .stat("atom1_exact", law.atom1)
        .stat("r_minus", law.r_minus)
        .stat("r_plus", law.r_plus)
        .stat("min_eigenvalue", lo)
        .stat("max_eigenvalue", hi);
    r.check("ks_at_most_0.08", 0.08 - ks)
        .check("atom0_within_0.05", 0.05 - (atom0 - law.atom0).abs())
        .check("atom1_within_0.05", 0.05 - (atom1 - law.atom1).abs())
        .check(
            "eigenvalues_in_unit_interval",
            RANGE_SLACK - (-lo).max(hi - 1.0).max(0.0),
        );
    let mut hist = Histogram::new(0.0, 1.0, JACOBI_BINS)?;
    hist.extend(&values);
    r.histograms.insert("eigenvalue".into(), hist);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_zero_is_initial_spectrum() {
        let pair = ProjectionPair::four_by_four_example();
        let r = jacobi_path_experiment(&pair, 3, &[0.0], 2, 1, &SimOptions::default()).unwrap();
        assert_eq!(r.get("zero_block_size"), Some(6.0));
        assert!((r.get("initial_value_0").unwrap() - 0.2).abs() < 1e-12);
        assert!((r.get("initial_value_1").unwrap() - 0.8).abs() < 1e-12);
        assert_eq!(r.get("t=0/trials_all_within_0.05"), Some(1.0));
        assert_eq!(r.get("t=0/trials_band_nonempty"), Some(0.0));
        let h = &r.histograms["t=0"];
        assert_eq!(h.total(), 2 * 6);
        assert_eq!(h.counts[200], 6);
        assert_eq!(h.counts[800], 6);
    }

    #[test]
    fn longtime_rejects_fractional_ranks() {
        let o = SimOptions::default();
        assert!(matches!(
            jacobi_longtime_experiment(0.3, 0.5, 8, 16.0, 1, 0, true, &o),
            Err(Error::Contract(_))
        ));
        assert!(jacobi_longtime_experiment(0.5, 0.5, 8, 2.0, 1, 0, false, &o).is_err());
    }

    #[test]
    fn complementary_traces_have_no_atom_at_one() {
        let o = SimOptions::default();
        let r = jacobi_longtime_experiment(0.25, 0.75, 32, 0.0, 10, 3, true, &o).unwrap();
        assert_eq!(r.get("atom1_exact"), Some(0.0));
        assert!(r.get("atom1_estimate").unwrap() < 0.05);
        assert!(r.find_check("eigenvalues_in_unit_interval").unwrap().pass);
    }
}
