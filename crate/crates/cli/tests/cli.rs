use std::process::{Command, Output};

fn ubmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ubmlab"))
        .args(args)
        .env_remove("UBMLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn quantile_at_median_is_zero() {
    let o = ubmlab(&["quantile", "--t", "1", "--r", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0.0\n");
}

#[test]
fn density_grid_integrates_to_one() {
    let o = ubmlab(&["density", "--t", "1", "--grid", "512"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# density: "));
    assert_eq!(lines.next().unwrap(), "theta,density,density_per_radian");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 512);
    let mass: f64 = rows
        .windows(2)
        .map(|w| 0.5 * (w[0][1] + w[1][1]) * (w[1][0] - w[0][0]))
        .sum::<f64>()
        / std::f64::consts::TAU;
    assert!((mass - 1.0).abs() < 1e-3, "{mass}");
}

#[test]
fn moments_tables_and_exit_codes() {
    let o = ubmlab(&["moments", "--n-max", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let diff = header.iter().position(|&c| c == "abs_diff").unwrap();
    let pass = header.iter().position(|&c| c == "pass").unwrap();
    for line in text.lines().skip(2) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[diff], "0");
        assert_eq!(cells[pass], "1");
    }
    assert_eq!(ubmlab(&["moments"]).status.code(), Some(0));
    assert_eq!(ubmlab(&["moments", "--t-list", "-1"]).status.code(), Some(2));
    assert_eq!(ubmlab(&["moments", "--n-max", "13"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    let o = ubmlab(&["hard-edge", "--N", "4", "--t", "1", "--trials", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"));
    assert_eq!(ubmlab(&["quantile", "--t", "1", "--r", "1.5"]).status.code(), Some(2));
    assert_eq!(ubmlab(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        ubmlab(&["jacobi", "--mode", "longtime", "--alpha", "0.3", "--beta", "0.5", "--N", "8",
            "--seed", "1", "--haar"])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn failed_check_exits_one() {
    // two eigenvalues cannot reach the edge of the limit support
    let o = ubmlab(&["hard-edge", "--N", "2", "--t", "1", "--trials", "3", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["hard-edge", "--N", "6", "--t", "0.5", "--trials", "4", "--seed", "3", "--format", "json"];
    let a = ubmlab(&args);
    let b = ubmlab(&args);
    assert_eq!(a.stdout, b.stdout);
    let mut threaded = vec!["--threads", "3"];
    threaded.extend_from_slice(&args);
    assert_eq!(ubmlab(&threaded).stdout, a.stdout);
    let json: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(json["config"]["command"], "hard-edge");
    assert_eq!(json["config"]["params"]["seed"], 3);
    assert_eq!(json["histograms"]["angle"]["counts"].as_array().unwrap().len(), 1000);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 5\n[coupling]\nN = 8\nt = 0.5\ntrials = 2\n").unwrap();
    let out = dir.path().join("c.json");
    let o = ubmlab(&[
        "--config", cfg.to_str().unwrap(), "coupling", "--trials", "3", "--format", "json",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["params"]["trials"], 3);
    assert_eq!(json["params"]["N"], 8);
    assert_eq!(json["params"]["seed"], 5);
}

#[test]
fn jacobi_modes_run() {
    let o = ubmlab(&["jacobi", "--mode", "path", "--N", "2", "--t-list", "0,0.01", "--trials", "2",
        "--seed", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["stats"]["t=0/trials_all_within_0.05"], 1.0);
    let o = ubmlab(&["jacobi", "--mode", "longtime", "--alpha", "0.5", "--beta", "0.5", "--N", "16",
        "--trials", "4", "--seed", "1", "--haar"]);
    assert!(matches!(o.status.code(), Some(0) | Some(1)));
    assert!(stdout(&o).starts_with("# jacobi_longtime: "));
}

#[test]
fn threads_env_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_ubmlab"))
        .args(["quantile", "--t", "1", "--r", "0.25"])
        .env("UBMLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
