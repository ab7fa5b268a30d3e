use std::f64::consts::PI;

use num_complex::Complex64;

use super::geometry::{hausdorff_to_arc, sorted_coupling_distance};
use super::report::{ExperimentReport, Histogram, Table};
use super::stats::{ks_two_sample, mean_se, median, percentile};
use super::trials::{require_trials, run_trials, SimOptions};
use crate::error::{Error, Result};
use crate::freemeasure::{support_halfwidth, Pushforward};
use crate::rmt_sim::{
    eigangles, hermitian_eigenvalues, normalized_trace_powers, sample_gue, ubm_endpoint,
    ubm_sample_path_with, RngStream,
};
use crate::symflow::{check_cauchy_bound, check_moment_bound, finite_n_moment, free_moment};

pub const HARD_EDGE_MARGINS: [f64; 3] = [0.02, 0.05, 0.1];
pub const ANGLE_BINS: usize = 1000;
/// KS passes are only asserted from this many trials on.
pub const MIN_KS_TRIALS: usize = 100;
pub const KS_LEVEL: f64 = 0.01;

fn sim_params(r: &mut ExperimentReport, n: usize, t: f64, trials: usize, seed: u64, opts: &SimOptions) {
    r.param("N", n as u64)
        .param("t", t)
        .param("trials", trials as u64)
        .param("seed", seed)
        .param("step", opts.step)
        .param("scheme", opts.scheme.name());
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("time {t} must be finite and nonnegative")));
    }
    Ok(())
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Size("matrix dimension must be at least 1".into()));
    }
    Ok(())
}

/// Spectra of `trials` independent copies of `U_t^N` against the support
/// arc of the limit law.
pub fn hard_edge_experiment(
    n: usize,
    t: f64,
    trials: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<ExperimentReport> {
    check_dim(n)?;
    check_time(t)?;
    require_trials(trials)?;
    let a = support_halfwidth(t)?;
    let spectra = run_trials(trials, seed, |_, rng| {
        let u = ubm_endpoint(n, t, opts.step, opts.scheme, rng)?;
        let angles = eigangles(&u)?;
        let d = hausdorff_to_arc(&angles, a)?;
        Ok((angles, d))
    })?;

    let mut r = ExperimentReport::new("hard_edge");
    sim_params(&mut r, n, t, trials, seed, opts);
    r.param("hausdorff_metric", "chordal");
    let mut hist = Histogram::new(-PI, PI, ANGLE_BINS)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut outside = [0u64; 3];
    let mut dists = Vec::with_capacity(trials);
    for (angles, d) in &spectra {
        hist.extend(angles);
        for &x in angles {
            lo = lo.min(x);
            hi = hi.max(x);
            for (k, m) in HARD_EDGE_MARGINS.iter().enumerate() {
                if x.abs() > a + m {
                    outside[k] += 1;
                }
            }
        }
        dists.push(*d);
    }
    let max_abs = lo.abs().max(hi.abs());
    r.stat("half_width", a)
        .stat("min_angle", lo)
        .stat("max_angle", hi)
        .stat("max_abs_angle", max_abs)
        .stat("hausdorff_max", dists.iter().copied().fold(0.0, f64::max))
        .stat("hausdorff_mean", mean_se(&dists).0)
        .stat("hausdorff_median", median(&dists));
    for (k, m) in HARD_EDGE_MARGINS.iter().enumerate() {
        r.stat(&format!("outside_margin_{m}"), outside[k] as f64);
    }
    if a < PI {
        r.check("no_angle_outside_margin_0.05", a + 0.05 - max_abs);
        r.check("edge_within_0.05", 0.05 - (max_abs - a).abs());
    } else {
        r.check("no_angle_outside_margin_0.05", 0.0);
    }
    r.histograms.insert("angle".into(), hist);
    Ok(r)
}

/// Exact bound checks on the full grid `1..=n_max` x `dims` x `times`.
pub fn moment_table(n_max: usize, dims: &[u64], times: &[f64]) -> Result<ExperimentReport> {
    if n_max == 0 || n_max > 12 {
        return Err(Error::Size(format!("n_max = {n_max} outside 1..=12")));
    }
    if dims.is_empty() || times.is_empty() || dims.contains(&0) {
        return Err(Error::domain("dimension and time lists must be nonempty, with N >= 1"));
    }
    for &t in times {
        check_time(t)?;
    }
    let columns = [
        "n", "N", "t", "finite", "free", "abs_diff", "bound", "pass", "finite_2N", "cauchy_diff",
        "cauchy_bound", "cauchy_pass",
    ];
    let mut rows = Vec::new();
    let (mut worst, mut worst_cauchy) = (f64::INFINITY, f64::INFINITY);
    for n in 1..=n_max {
        for &dim in dims {
            for &t in times {
                let b = check_moment_bound(n, dim, t)?;
                let c = check_cauchy_bound(n, dim, t)?;
                worst = worst.min(b.margin());
                worst_cauchy = worst_cauchy.min(c.margin());
                rows.push(vec![
                    n as f64,
                    dim as f64,
                    t,
                    finite_n_moment(n, dim, t)?,
                    free_moment(n, t)?,
                    b.lhs,
                    b.rhs,
                    b.pass as u8 as f64,
                    finite_n_moment(n, 2 * dim, t)?,
                    c.lhs,
                    c.rhs,
                    c.pass as u8 as f64,
                ]);
            }
        }
    }
    let mut r = ExperimentReport::new("moment_table");
    r.param("n_max", n_max as u64)
        .param("N_list", dims.to_vec())
        .param("t_list", times.to_vec());
    r.stat("rows", rows.len() as f64)
        .stat("min_margin", worst)
        .stat("min_cauchy_margin", worst_cauchy);
    r.check("moment_bound", worst).check("cauchy_bound", worst_cauchy);
    r.table = Some(Table {
        columns: columns.iter().map(|s| s.to_string()).collect(),
        rows,
    });
    Ok(r)
}

/// Monte Carlo means of `tr U_t^n`, `n = 1..=n_max`, against the exact
/// finite-N values, with a 3-standard-error check per moment.
pub fn weak_moment_experiment(
    n: usize,
    t: f64,
    n_max: usize,
    trials: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<ExperimentReport> {
    check_dim(n)?;
    check_time(t)?;
    if trials < 2 {
        return Err(Error::domain("at least two trials are needed for a standard error"));
    }
    if n_max == 0 || n_max > 12 {
        return Err(Error::Size(format!("n_max = {n_max} outside 1..=12")));
    }
    let traces = run_trials(trials, seed, |_, rng| {
        let u = ubm_endpoint(n, t, opts.step, opts.scheme, rng)?;
        Ok(normalized_trace_powers(&u, n_max))
    })?;
    let mut r = ExperimentReport::new("simulate");
    sim_params(&mut r, n, t, trials, seed, opts);
    r.param("n_max", n_max as u64);
    let mut rows = Vec::new();
    for m in 1..=n_max {
        let re: Vec<f64> = traces.iter().map(|v| v[m - 1].re).collect();
        let im: Vec<f64> = traces.iter().map(|v| v[m - 1].im).collect();
        let (mean, se) = mean_se(&re);
        let (mean_im, se_im) = mean_se(&im);
        let exact = finite_n_moment(m, n as u64, t)?;
        let z = if se > 0.0 { (mean - exact) / se } else { 0.0 };
        r.stat(&format!("mean_re_{m}"), mean)
            .stat(&format!("mean_im_{m}"), mean_im)
            .stat(&format!("se_{m}"), se)
            .stat(&format!("exact_{m}"), exact)
            .stat(&format!("z_{m}"), z);
        let tol = 3.0 * se;
        r.check(&format!("moment_{m}_within_3se"), tol - (mean - exact).abs());
        r.check(&format!("moment_{m}_imag_within_3se"), 3.0 * se_im - mean_im.abs());
        rows.push(vec![m as f64, mean, mean_im, se, exact, z]);
    }
    r.table = Some(Table {
        columns: ["n", "mean_re", "mean_im", "se", "exact", "z"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
    });
    Ok(r)
}

/// Sorted coupling between the pushforward of an independent GUE spectrum
/// and the spectrum of `U_t^N`.
pub fn coupling_experiment(
    n: usize,
    t: f64,
    trials: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<ExperimentReport> {
    check_dim(n)?;
    require_trials(trials)?;
    if !(t > 0.0 && t < 4.0) {
        return Err(Error::domain(format!("coupling needs 0 < t < 4, got {t}")));
    }
    let map = Pushforward::new(t)?;
    let cs = run_trials(trials, seed, |_, rng: &mut RngStream| {
        let u = ubm_endpoint(n, t, opts.step, opts.scheme, rng)?;
        let x = sample_gue(n, rng)?;
        let theta = eigangles(&u)?;
        let xs = hermitian_eigenvalues(&x.matrix)?;
        let fx = xs.iter().map(|&v| map.apply(v)).collect::<Result<Vec<_>>>()?;
        let us: Vec<Complex64> = theta.iter().map(|&a| Complex64::cis(a)).collect();
        sorted_coupling_distance(&fx, &us)
    })?;
    let mut r = ExperimentReport::new("coupling");
    sim_params(&mut r, n, t, trials, seed, opts);
    r.stat("median", median(&cs))
        .stat("p90", percentile(&cs, 0.9))
        .stat("mean", mean_se(&cs).0)
        .stat("max", cs.iter().copied().fold(0.0, f64::max));
    r.table = Some(Table {
        columns: vec!["trial".into(), "c".into()],
        rows: cs.iter().enumerate().map(|(k, &c)| vec![k as f64, c]).collect(),
    });
    Ok(r)
}

fn ks_report(r: &mut ExperimentReport, a: &[f64], b: &[f64], trials: usize) -> Result<()> {
    let ks = ks_two_sample(a, b)?;
    r.stat("ks_statistic", ks.statistic)
        .stat("ks_p_value", ks.p_value)
        .stat("pooled_a", a.len() as f64)
        .stat("pooled_b", b.len() as f64);
    r.param("ks_asserted", trials >= MIN_KS_TRIALS);
    if trials >= MIN_KS_TRIALS {
        r.check("ks_pass_at_1pct", ks.p_value - KS_LEVEL);
    }
    Ok(())
}

/// Two-sample KS between the eigenangles of `U_s^{-1} U_t` and of an
/// independent `U_{t-s}`.
pub fn increment_stationarity_check(
    n: usize,
    s: f64,
    t: f64,
    trials: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<ExperimentReport> {
    check_dim(n)?;
    require_trials(trials)?;
    if !(s >= 0.0 && s < t && t.is_finite()) {
        return Err(Error::domain(format!("need 0 <= s < t, got s = {s}, t = {t}")));
    }
    let pairs = run_trials(trials, seed, |k, _| {
        let mut path_rng = RngStream::new(seed, 2 * k as u64);
        let mut fresh_rng = RngStream::new(seed, 2 * k as u64 + 1);
        let path = ubm_sample_path_with(n, &[s, t], opts.step, opts.scheme, &mut path_rng)?;
        let inc = path.matrices[0].adjoint() * &path.matrices[1];
        let fresh = ubm_endpoint(n, t - s, opts.step, opts.scheme, &mut fresh_rng)?;
        Ok((eigangles(&inc)?, eigangles(&fresh)?))
    })?;
    let a: Vec<f64> = pairs.iter().flat_map(|p| p.0.iter().copied()).collect();
    let b: Vec<f64> = pairs.iter().flat_map(|p| p.1.iter().copied()).collect();
    let mut r = ExperimentReport::new("increment_stationarity");
    sim_params(&mut r, n, t, trials, seed, opts);
    r.param("s", s);
    ks_report(&mut r, &a, &b, trials)?;
    Ok(r)
}

/// Two-sample KS between the eigenangles of `U_t^{-1}` and of an
/// independent `U_t`.
pub fn time_reversal_check(
    n: usize,
    t: f64,
    trials: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<ExperimentReport> {
    check_dim(n)?;
    check_time(t)?;
    require_trials(trials)?;
    let pairs = run_trials(trials, seed, |k, _| {
        let mut a_rng = RngStream::new(seed, 2 * k as u64);
        let mut b_rng = RngStream::new(seed, 2 * k as u64 + 1);
        let u = ubm_endpoint(n, t, opts.step, opts.scheme, &mut a_rng)?;
        let v = ubm_endpoint(n, t, opts.step, opts.scheme, &mut b_rng)?;
        Ok((eigangles(&u.adjoint().to_owned())?, eigangles(&v)?))
    })?;
    let a: Vec<f64> = pairs.iter().flat_map(|p| p.0.iter().copied()).collect();
    let b: Vec<f64> = pairs.iter().flat_map(|p| p.1.iter().copied()).collect();
    let mut r = ExperimentReport::new("time_reversal");
    sim_params(&mut r, n, t, trials, seed, opts);
    ks_report(&mut r, &a, &b, trials)?;
    Ok(r)
}
