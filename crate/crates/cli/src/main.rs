//! `schrolab`: run one experiment, print its verdict table, and optionally
//! write the JSON report and the flat CSV of records.
//!
//! Exit status: 0 when every verdict passes, 1 on a failed verdict or a
//! numerical failure, 2 on usage or configuration errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde::Deserialize;

use schrolab::counterexamples::{
    annulus_experiment, default_kappa_grid, dk1d_experiment, highp_experiment_with, lemma_kappa_search,
    lemma_random_suite, linfty_divergence_experiment, thin_annulus_experiment,
};
use schrolab::oscillatory::{stationary_phase_experiment, van_der_corput_experiment};
use schrolab::propagator::{kernel_sup_bound_experiment, propagation_experiment, TimeGrid};
use schrolab::report::{Comparison, ExperimentReport, Record};
use schrolab::spaces::{index_high, index_low, p_n_min, RegularityIndex};
use schrolab::special::bessel_experiment;
use schrolab::LabError;

/// Environment variable that caps the worker threads of parallel sweeps.
const THREADS_ENV: &str = "SCHROLAB_THREADS";

const COMMANDS: &[&str] = &[
    "indices",
    "kernel-bound",
    "stationary-phase",
    "bessel",
    "propagate",
    "counterexample:dk1d",
    "counterexample:annulus",
    "counterexample:thin-annulus",
    "counterexample:highp",
    "counterexample:linfty",
    "lemma",
];

#[derive(Parser, Debug, Default, Deserialize)]
#[command(
    name = "schrolab",
    version,
    about = "Oscillatory-integral checks and counterexample sweeps for Schrödinger maximal estimates",
    after_help = "Commands: indices, kernel-bound, stationary-phase, bessel, propagate, lemma,\n\
                  counterexample:{dk1d, annulus, thin-annulus, highp, linfty}.\n\
                  Sweeps are dyadic exponents START:STOP[:COUNT]; dk1d reads them as nu = 2^-e.\n\
                  SCHROLAB_THREADS sets the number of worker threads."
)]
#[serde(deny_unknown_fields, default)]
struct RunConfig {
    /// Experiment to run.
    command: Option<String>,
    /// JSON file with any of these options; command-line flags win.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Dimension n.
    #[arg(long)]
    n: Option<usize>,
    /// Integrability exponent p.
    #[arg(long)]
    p: Option<f64>,
    /// Smoothness s.
    #[arg(long)]
    s: Option<f64>,
    /// Dyadic sweep START:STOP[:COUNT] of exponents.
    #[arg(long)]
    sweep: Option<String>,
    /// Bessel orders for `bessel` (repeatable).
    #[arg(long)]
    nu: Option<Vec<f64>>,
    /// Fixed time t0 for `counterexample:linfty`.
    #[arg(long)]
    t0: Option<f64>,
    /// Inner radius R for `counterexample:linfty` (default: margin search).
    #[arg(long)]
    r: Option<f64>,
    /// Far-field decay order N for `counterexample:highp`.
    #[arg(long)]
    far_order: Option<i32>,
    /// λ of the two-dimensional Fresnel check (`stationary-phase`).
    #[arg(long)]
    fresnel_lambda: Option<f64>,
    /// Run the Van der Corput corpus instead (`stationary-phase`).
    #[arg(long)]
    #[serde(default)]
    van_der_corput: bool,
    /// Log-spaced times in (2^-20, 1) for `kernel-bound`.
    #[arg(long)]
    times: Option<usize>,
    /// Seed for `propagate` and `lemma`.
    #[arg(long)]
    seed: Option<u64>,
    /// Sample count for `propagate` and `lemma`.
    #[arg(long)]
    samples: Option<usize>,
    /// Replaces the tolerance of every slope verdict.
    #[arg(long)]
    slope_tol: Option<f64>,
    /// Write OUT.json and OUT.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunConfig {
    /// Fills options missing on the command line from `file`.
    fn merge(mut self, file: RunConfig) -> Self {
        macro_rules! fill {
            ($($f:ident),*) => { $( if self.$f.is_none() { self.$f = file.$f; } )* };
        }
        fill!(command, n, p, s, sweep, nu, t0, r, far_order, fresnel_lambda, times, seed, samples, slope_tol, out);
        self.van_der_corput |= file.van_der_corput;
        self
    }
}

/// Why a run did not produce a passing report.
enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        match e {
            LabError::DegenerateSweep(_)
            | LabError::OutOfRange(_)
            | LabError::InvalidInput(_)
            | LabError::UnsupportedDimension(_)
            | LabError::DomainError(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

type Run<T> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Run<T> {
    Err(Failure::Usage(msg.into()))
}

/// Exponents START..STOP with COUNT points (default: unit steps).
fn parse_sweep(spec: &str) -> Run<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 2 && parts.len() != 3 {
        return usage(format!("sweep must be START:STOP[:COUNT], got {spec:?}"));
    }
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("bad sweep bound {s:?}")));
    let (a, b) = (num(parts[0])?, num(parts[1])?);
    let count = match parts.get(2) {
        Some(c) => c
            .trim()
            .parse::<usize>()
            .map_err(|_| Failure::Usage(format!("bad sweep count {c:?}")))?,
        None => {
            if a.fract() != 0.0 || b.fract() != 0.0 {
                return usage("sweep without COUNT needs integer bounds");
            }
            (b - a).abs() as usize + 1
        }
    };
    if count < 3 {
        return usage(format!("sweep {spec:?} has {count} points; slope fits need at least 3"));
    }
    Ok((0..count)
        .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
        .collect())
}

fn sweep_or(cfg: &RunConfig, default: &str) -> Run<Vec<f64>> {
    parse_sweep(cfg.sweep.as_deref().unwrap_or(default))
}

fn pow2(exps: &[f64]) -> Vec<f64> {
    exps.iter().map(|e| e.exp2()).collect()
}

fn integer_exponents(exps: &[f64]) -> Run<Vec<u32>> {
    exps.iter()
        .map(|&e| {
            if e.fract() == 0.0 && e >= 0.0 {
                Ok(e as u32)
            } else {
                usage(format!("annulus sweeps need nonnegative integer k, got {e}"))
            }
        })
        .collect()
}

fn require<T: Copy>(value: Option<T>, name: &str, command: &str) -> Run<T> {
    value.ok_or_else(|| Failure::Usage(format!("{command} needs --{name}")))
}

fn indices(cfg: &RunConfig) -> Run<ExperimentReport> {
    let n = require(cfg.n, "n", "indices")?;
    let mut report = ExperimentReport::new("indices");
    report.echo("n", n);
    let pn = p_n_min(n)?;
    report.echo("p_n", pn);
    let mut ps = vec![1.0, 1.5, 2.0, 2.0 + 0.5 * pn, 2.0 + pn, 8.0];
    if let Some(p) = cfg.p {
        report.echo("p", p);
        ps = vec![p];
    }
    for p in ps {
        let idx = RegularityIndex::threshold(n, p)?;
        report.push(Record::new("threshold", p, idx.s));
        println!("s({p}) = {:.6}", idx.s);
    }
    let nf = n as f64;
    report.check("s(2) = n/(2n+2)", index_low(n, 2.0)?, nf / (2.0 * nf + 2.0), Comparison::Within, 0.0);
    report.check(
        "index_low(2) = index_high(2)",
        index_high(n, 2.0)?,
        index_low(n, 2.0)?,
        Comparison::Within,
        1e-12,
    );
    if let Some(s) = cfg.s {
        let p = require(cfg.p, "p", "indices with --s")?;
        let threshold = RegularityIndex::threshold(n, p)?.s;
        report.echo("s", s);
        println!("s = {s} is {} the threshold {threshold:.6}", if s > threshold { "above" } else { "at or below" });
    }
    Ok(report)
}

fn lemma(cfg: &RunConfig) -> Run<ExperimentReport> {
    let seed = cfg.seed.unwrap_or(20240601);
    let count = cfg.samples.unwrap_or(200);
    let mut report = ExperimentReport::new("lemma");
    report.echo("seed", seed).echo("samples", count);
    let suite = lemma_random_suite(seed, count)?;
    let mut worst = f64::MIN;
    for (i, c) in suite.iter().enumerate() {
        report.push(Record::new("lhs_over_rhs", i as f64, c.lhs / c.rhs));
        worst = worst.max(c.lhs / c.rhs);
    }
    report.check("band-limit inequality lhs/rhs", worst, 1.0, Comparison::AtMost, 0.0);
    let k = lemma_kappa_search(&default_kappa_grid())?;
    report.echo("kappa0", k.kappa0).echo("second_moment", k.second_moment);
    report.check("kappa0 exceeds 2 sqrt 2", k.kappa0, 2.0 * std::f64::consts::SQRT_2, Comparison::AtLeast, 0.0);
    Ok(report)
}

fn dispatch(cfg: &RunConfig) -> Run<ExperimentReport> {
    let command = match cfg.command.as_deref() {
        Some(c) if COMMANDS.contains(&c) => c,
        Some(c) => return usage(format!("unknown command {c:?}; expected one of {}", COMMANDS.join(", "))),
        None => return usage(format!("missing command; expected one of {}", COMMANDS.join(", "))),
    };
    let report = match command {
        "indices" => indices(cfg)?,
        "kernel-bound" => {
            let n = cfg.n.unwrap_or(1);
            let s = require(cfg.s, "s", command)?;
            let z = pow2(&sweep_or(cfg, "-6:6")?);
            let times = match cfg.times {
                Some(count) => TimeGrid::log_spaced(-20.0, count)?,
                None => TimeGrid::default_log(),
            };
            kernel_sup_bound_experiment(s, n, &z, &times)?
        }
        "stationary-phase" => {
            let lambdas = pow2(&sweep_or(cfg, "4:12")?);
            if cfg.van_der_corput {
                van_der_corput_experiment(&lambdas)?
            } else {
                stationary_phase_experiment(&lambdas, cfg.fresnel_lambda.unwrap_or(1024.0))?
            }
        }
        "bessel" => {
            let orders = cfg.nu.clone().unwrap_or_else(|| vec![0.0, 1.0]);
            bessel_experiment(&orders, &pow2(&sweep_or(cfg, "3:10")?))?
        }
        "propagate" => propagation_experiment(cfg.seed.unwrap_or(2024), cfg.samples.unwrap_or(20))?,
        "counterexample:dk1d" => {
            let nus: Vec<f64> = sweep_or(cfg, "3:8")?.iter().map(|e| (-e).exp2()).collect();
            dk1d_experiment(require(cfg.p, "p", command)?, require(cfg.s, "s", command)?, &nus)?
        }
        "counterexample:annulus" => annulus_experiment(
            cfg.n.unwrap_or(2),
            require(cfg.p, "p", command)?,
            require(cfg.s, "s", command)?,
            &integer_exponents(&sweep_or(cfg, "3:8")?)?,
        )?,
        "counterexample:thin-annulus" => thin_annulus_experiment(
            cfg.n.unwrap_or(2),
            cfg.p.unwrap_or(2.0),
            require(cfg.s, "s", command)?,
            &integer_exponents(&sweep_or(cfg, "3:8")?)?,
        )?,
        "counterexample:highp" => highp_experiment_with(
            cfg.n.unwrap_or(1),
            require(cfg.p, "p", command)?,
            require(cfg.s, "s", command)?,
            &pow2(&sweep_or(cfg, "4:10")?),
            cfg.far_order.unwrap_or(2),
        )?,
        "counterexample:linfty" => linfty_divergence_experiment(
            cfg.n.unwrap_or(1),
            require(cfg.s, "s", command)?,
            cfg.t0.unwrap_or(0.3),
            cfg.r,
            &pow2(&sweep_or(cfg, "3:7")?),
        )?,
        "lemma" => lemma(cfg)?,
        _ => unreachable!("command list checked above"),
    };
    Ok(report)
}

fn write_outputs(report: &ExperimentReport, out: &PathBuf) -> Run<()> {
    let json = serde_json::to_string_pretty(report).map_err(|e| Failure::Numerical(e.to_string()))?;
    let io = |e: std::io::Error| Failure::Usage(format!("cannot write {}: {e}", out.display()));
    fs::write(out.with_extension("json"), json + "\n").map_err(io)?;
    let file = fs::File::create(out.with_extension("csv")).map_err(io)?;
    report.write_csv(file)?;
    Ok(())
}

fn load(path: &PathBuf) -> Run<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
}

fn run(cfg: RunConfig) -> Run<bool> {
    let cfg = match &cfg.config {
        Some(path) => {
            let file = load(path)?;
            cfg.merge(file)
        }
        None => cfg,
    };
    if let Some(tol) = cfg.slope_tol {
        if !(tol > 0.0) {
            return usage("--slope-tol must be positive");
        }
    }
    let mut report = dispatch(&cfg)?;
    if let Some(tol) = cfg.slope_tol {
        report.override_slope_tolerance(tol);
    }
    print!("{}", report.render());
    if let Some(out) = &cfg.out {
        write_outputs(&report, out)?;
    }
    Ok(report.passed())
}

fn configure_threads() -> Run<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let threads: usize = v
            .parse()
            .map_err(|_| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        if threads == 0 {
            return usage(format!("{THREADS_ENV} must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    let outcome = configure_threads().and_then(|_| run(cfg));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
