//! `ubmlab`: command-line front end for the exact moment tables, the limit
//! law and the simulation harnesses.
//!
//! Exit codes: 0 success, 1 an experiment check failed, 2 usage error,
//! 3 numerical failure.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use config::Resolver;
use ubmlab_core::experiments::{
    configure_threads, coupling_experiment, hard_edge_experiment, increment_stationarity_check,
    jacobi_longtime_experiment, jacobi_path_experiment, moment_table, weak_moment_experiment,
    ExperimentReport, ProjectionPair, SimOptions, Table,
};
use ubmlab_core::freemeasure::SpectralMeasureNuT;
use ubmlab_core::rmt_sim::{Scheme, DEFAULT_STEP};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
}

impl From<ubmlab_core::Error> for CliError {
    fn from(e: ubmlab_core::Error) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(name = "ubmlab", version, about = "Brownian motion on the unitary group: exact moments, limit laws, simulation")]
struct Cli {
    /// Worker threads (falls back to UBMLAB_THREADS, then the core count).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML file with defaults; top-level keys apply to every command and a
    /// `[command]` table to that command. Flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Path,
    Longtime,
}

#[derive(Args)]
struct Output {
    /// Output file (standard output if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct Sim {
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Integrator step.
    #[arg(long, allow_negative_numbers = true)]
    step: Option<f64>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SchemeArg {
    Geodesic,
    EulerPolar,
}

#[derive(Subcommand)]
enum Command {
    /// Exact moment bound table over a grid.
    Moments {
        #[arg(long = "n-max")]
        n_max: Option<usize>,
        #[arg(long = "N-list", value_delimiter = ',', allow_negative_numbers = true)]
        n_list: Option<Vec<i64>>,
        #[arg(long = "t-list", value_delimiter = ',', allow_negative_numbers = true)]
        t_list: Option<Vec<f64>>,
        #[command(flatten)]
        output: Output,
    },
    /// Density of the limit law on a uniform angle grid.
    Density {
        #[arg(long, allow_negative_numbers = true)]
        t: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Quantile of the limit law.
    Quantile {
        #[arg(long, allow_negative_numbers = true)]
        t: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        r: Option<f64>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Monte Carlo moments of U_t against the exact values.
    Simulate {
        #[command(flatten)]
        sim: Sim,
        #[arg(long = "n-max")]
        n_max: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Eigenangle range and histogram against the support arc.
    HardEdge {
        #[command(flatten)]
        sim: Sim,
        #[command(flatten)]
        output: Output,
    },
    /// Sorted coupling between pushed-forward GUE and unitary spectra.
    Coupling {
        #[command(flatten)]
        sim: Sim,
        #[command(flatten)]
        output: Output,
    },
    /// KS test of U_s^{-1} U_t against a fresh U_{t-s}.
    Stationarity {
        #[command(flatten)]
        sim: Sim,
        #[arg(long, allow_negative_numbers = true)]
        s: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Matrix Jacobi process: island tracking along a path, or the
    /// long-time law against the free Jacobi law.
    Jacobi {
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[command(flatten)]
        sim: Sim,
        /// Times for path mode (the pair is the built-in 4x4 example).
        #[arg(long = "t-list", value_delimiter = ',', allow_negative_numbers = true)]
        t_list: Option<Vec<f64>>,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        /// Long-time mode: sample U exactly from Haar measure.
        #[arg(long)]
        haar: bool,
        #[command(flatten)]
        output: Output,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Moments { .. } => "moments",
            Command::Density { .. } => "density",
            Command::Quantile { .. } => "quantile",
            Command::Simulate { .. } => "simulate",
            Command::HardEdge { .. } => "hard-edge",
            Command::Coupling { .. } => "coupling",
            Command::Stationarity { .. } => "stationarity",
            Command::Jacobi { .. } => "jacobi",
        }
    }
}

struct Common {
    n: usize,
    t: f64,
    trials: usize,
    seed: u64,
    opts: SimOptions,
}

fn resolve_sim(res: &mut Resolver, sim: Sim, default_trials: usize) -> Result<Common, CliError> {
    let n = res.require("N", sim.n)?;
    let t = res.require("t", sim.t)?;
    let trials = res.or("trials", sim.trials, default_trials)?;
    let seed = res.require("seed", sim.seed)?;
    let step = res.or("step", sim.step, DEFAULT_STEP)?;
    let scheme = match res.or("scheme", sim.scheme, SchemeArg::Geodesic)? {
        SchemeArg::Geodesic => Scheme::Geodesic,
        SchemeArg::EulerPolar => Scheme::EulerPolar,
    };
    Ok(Common {
        n,
        t,
        trials,
        seed,
        opts: SimOptions { step, scheme },
    })
}

fn resolve_output(res: &mut Resolver, out: Output) -> Result<(Option<PathBuf>, Format), CliError> {
    let path = res.get("out", out.out)?;
    let format = res.or("format", out.format, Format::Csv)?;
    Ok((path, format))
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Usage(format!("cannot write output: {e}")))
        }
    }
}

fn finish(
    mut report: ExperimentReport,
    res: &Resolver,
    path: Option<PathBuf>,
    format: Format,
) -> Result<bool, CliError> {
    report.config = Some(res.to_value());
    let text = match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    emit(&text, path.as_deref())?;
    Ok(report.all_pass())
}

fn density_report(t: f64, grid: usize) -> Result<ExperimentReport, CliError> {
    if grid < 2 {
        return Err(CliError::Usage("--grid needs at least 2 points".into()));
    }
    let nu = SpectralMeasureNuT::new(t)?;
    let a = nu.half_width();
    let h = 2.0 * a / (grid - 1) as f64;
    let mut rows = Vec::with_capacity(grid);
    for k in 0..grid {
        let theta = if k + 1 == grid { a } else { -a + h * k as f64 };
        let rho = nu.density(theta)?;
        rows.push(vec![theta, rho, rho / std::f64::consts::TAU]);
    }
    let trapezoid: f64 = rows
        .windows(2)
        .map(|w| 0.5 * (w[0][1] + w[1][1]) * (w[1][0] - w[0][0]))
        .sum::<f64>()
        / std::f64::consts::TAU;
    let mut r = ExperimentReport::new("density");
    r.param("t", t).param("grid", grid as u64);
    r.stat("half_width", a).stat("trapezoid_mass", trapezoid);
    r.table = Some(Table {
        columns: vec!["theta".into(), "density".into(), "density_per_radian".into()],
        rows,
    });
    Ok(r)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let name = cli.command.name();
    let mut res = Resolver::new(name, cli.config.as_deref())?;
    let threads = match cli.threads {
        Some(n) => Some(n),
        None => match std::env::var("UBMLAB_THREADS") {
            Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
                CliError::Usage(format!("UBMLAB_THREADS = {v:?} is not a positive integer"))
            })?),
            Err(_) => None,
        },
    };
    // thread count does not affect results, so it is not recorded
    if let Some(n) = threads {
        configure_threads(n)?;
    }

    match cli.command {
        Command::Moments {
            n_max,
            n_list,
            t_list,
            output,
        } => {
            let n_max = res.or("n-max", n_max, 6)?;
            let dims = res.or("N-list", n_list, (1..=8).collect())?;
            let times = res.or("t-list", t_list, vec![0.25, 0.5, 1.0, 2.0, 3.9])?;
            let (path, format) = resolve_output(&mut res, output)?;
            if let Some(bad) = dims.iter().find(|&&d| d < 1) {
                return Err(CliError::Usage(format!("--N-list entry {bad} must be at least 1")));
            }
            let dims: Vec<u64> = dims.into_iter().map(|d| d as u64).collect();
            let report = moment_table(n_max, &dims, &times)?;
            finish(report, &res, path, format)
        }
        Command::Density { t, grid, output } => {
            let t = res.require("t", t)?;
            let grid = res.or("grid", grid, 512)?;
            let (path, format) = resolve_output(&mut res, output)?;
            let report = density_report(t, grid)?;
            finish(report, &res, path, format)
        }
        Command::Quantile { t, r, format } => {
            let t = res.require("t", t)?;
            let r = res.require("r", r)?;
            let format = res.get("format", format)?;
            let q = SpectralMeasureNuT::new(t)?.quantile(r)?;
            let text = match format {
                Some(Format::Json) => {
                    let mut rep = ExperimentReport::new("quantile");
                    rep.param("t", t).param("r", r).stat("quantile", q);
                    rep.config = Some(res.to_value());
                    rep.to_json()
                }
                _ => format!("{q:?}\n"),
            };
            emit(&text, None)?;
            Ok(true)
        }
        Command::Simulate { sim, n_max, output } => {
            let c = resolve_sim(&mut res, sim, 2000)?;
            let n_max = res.or("n-max", n_max, 4)?;
            let (path, format) = resolve_output(&mut res, output)?;
            let report = weak_moment_experiment(c.n, c.t, n_max, c.trials, c.seed, &c.opts)?;
            finish(report, &res, path, format)
        }
        Command::HardEdge { sim, output } => {
            let c = resolve_sim(&mut res, sim, 100)?;
            let (path, format) = resolve_output(&mut res, output)?;
            let report = hard_edge_experiment(c.n, c.t, c.trials, c.seed, &c.opts)?;
            finish(report, &res, path, format)
        }
        Command::Coupling { sim, output } => {
            let c = resolve_sim(&mut res, sim, 20)?;
            let (path, format) = resolve_output(&mut res, output)?;
            let report = coupling_experiment(c.n, c.t, c.trials, c.seed, &c.opts)?;
            finish(report, &res, path, format)
        }
        Command::Stationarity { sim, s, output } => {
            let c = resolve_sim(&mut res, sim, 200)?;
            let s = res.require("s", s)?;
            let (path, format) = resolve_output(&mut res, output)?;
            let report = increment_stationarity_check(c.n, s, c.t, c.trials, c.seed, &c.opts)?;
            finish(report, &res, path, format)
        }
        Command::Jacobi {
            mode,
            mut sim,
            t_list,
            alpha,
            beta,
            haar,
            output,
        } => {
            let mode = res.or("mode", mode, Mode::Path)?;
            match mode {
                Mode::Path => {
                    let times = res.require("t-list", t_list)?;
                    // t is not used in path mode; supply it so the shared
                    // resolver does not demand it
                    sim.t = sim.t.or(Some(0.0));
                    let c = resolve_sim(&mut res, sim, 50)?;
                    res.run.params.remove("t");
                    let (path, format) = resolve_output(&mut res, output)?;
                    let pair = ProjectionPair::four_by_four_example();
                    let report =
                        jacobi_path_experiment(&pair, c.n, &times, c.trials, c.seed, &c.opts)?;
                    finish(report, &res, path, format)
                }
                Mode::Longtime => {
                    let alpha = res.require("alpha", alpha)?;
                    let beta = res.require("beta", beta)?;
                    let haar = res.or("haar", haar.then_some(true), false)?;
                    if haar {
                        sim.t = sim.t.or(Some(0.0));
                    }
                    let c = resolve_sim(&mut res, sim, 20)?;
                    let (path, format) = resolve_output(&mut res, output)?;
                    let report = jacobi_longtime_experiment(
                        alpha, beta, c.n, c.t, c.trials, c.seed, haar, &c.opts,
                    )?;
                    finish(report, &res, path, format)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("ubmlab: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("ubmlab: numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_kinds() {
        let usage: CliError = ubmlab_core::Error::Domain("x".into()).into();
        assert!(matches!(usage, CliError::Usage(_)));
        let numeric: CliError = ubmlab_core::Error::Convergence("x".into()).into();
        assert!(matches!(numeric, CliError::Numeric(_)));
    }
}
