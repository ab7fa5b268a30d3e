use std::f64::consts::PI;

use ubmlab_core::experiments::{
    increment_stationarity_check, ks_distance_to_cdf, mean_se, run_trials, time_reversal_check,
    SimOptions,
};
use ubmlab_core::rmt_sim::{
    eigangles, normalized_trace_powers, ubm_coupled_endpoints, ubm_sample_path, unitarity_defect,
    RngStream,
};
use ubmlab_core::symflow::finite_n_moment;

// Fine (step 0.005) and coarse (step 0.01) endpoints share their noise, so
// their difference isolates the discretization bias.
#[test]
fn step_halving_and_weak_error() {
    for n in [16usize, 32] {
        let traces = run_trials(2000, 11, |_, rng| {
            let (fine, coarse) = ubm_coupled_endpoints(n, 100, 0.01, rng)?;
            Ok((normalized_trace_powers(&fine, 4), normalized_trace_powers(&coarse, 4)))
        })
        .unwrap();
        for m in 1..=4 {
            let fine: Vec<f64> = traces.iter().map(|p| p.0[m - 1].re).collect();
            let coarse: Vec<f64> = traces.iter().map(|p| p.1[m - 1].re).collect();
            let (mf, se_f) = mean_se(&fine);
            let (mc, se_c) = mean_se(&coarse);
            let exact = finite_n_moment(m, n as u64, 1.0).unwrap();
            assert!((mc - exact).abs() < 3.0 * se_c, "N={n} n={m}: {mc} vs {exact} (se {se_c})");
            assert!((mf - exact).abs() < 3.0 * se_f, "N={n} n={m}: {mf} vs {exact} (se {se_f})");
            assert!((mf - mc).abs() < 2.0 * se_c, "N={n} n={m}: halving moved {}", mf - mc);
        }
    }
}

#[test]
fn paths_are_bit_identical_per_stream() {
    let run = |stream| {
        let mut rng = RngStream::new(42, stream);
        ubm_sample_path(12, &[0.0, 0.1, 0.5, 0.5, 1.0], 0.01, &mut rng)
            .unwrap()
            .matrices
    };
    let a = run(3);
    assert_eq!(a, run(3));
    assert_ne!(a[2], run(4)[2]);
    assert!(a.iter().all(|m| unitarity_defect(m) < 1e-10));
    assert_eq!(a[2], a[3]);
}

#[test]
fn long_time_spectrum_is_uniform() {
    let mut rng = RngStream::new(5, 0);
    let path = ubm_sample_path(64, &[50.0], 0.01, &mut rng).unwrap();
    let angles = eigangles(&path.matrices[0]).unwrap();
    let uniform = |x: f64| ((x + PI) / (2.0 * PI)).clamp(0.0, 1.0);
    let d = ks_distance_to_cdf(&angles, uniform, uniform).unwrap();
    assert!(d < 0.05, "KS {d}");
}

#[test]
fn increment_at_zero_matches_fresh_path() {
    let r = increment_stationarity_check(16, 0.0, 0.3, 100, 8, &SimOptions::default()).unwrap();
    assert!(r.find_check("ks_pass_at_1pct").unwrap().pass, "{:?}", r.stats);
}

#[test]
fn inverse_has_same_spectral_law() {
    let r = time_reversal_check(16, 0.7, 100, 9, &SimOptions::default()).unwrap();
    assert!(r.find_check("ks_pass_at_1pct").unwrap().pass, "{:?}", r.stats);
}
