use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lpdecay::convex_probe::{
    body_theta_grid, conjecture_scan, BodyKind, BodySpec, ConjectureReport, ConvexBody,
};
use lpdecay::decay::{
    blowup_fit, envelope_scan, log_grid, published_lower_constant, sequence_values,
    stationary_sequence, theta_grid, upper_bound_check, v_of_p, with_workers, FitResult, ScanGrid,
};
use lpdecay::fourier::chi_hat_lp;
use lpdecay::report::{envelope_csv, sequence_csv, EnvelopeRun, FitRun, SequenceRun};
use lpdecay::verify;
use lpdecay::{Error, Frequency, PExponent, QuadConfig};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_QUADRATURE: u8 = 3;
const EXIT_COUNTEREXAMPLE: u8 = 4;

#[derive(Parser)]
#[command(name = "lpdecay", version, about = "Fourier decay of l^p unit-ball indicators")]
struct Cli {
    /// Worker threads for scans (0 uses every core).
    #[arg(long, global = true, env = "LPDECAY_WORKERS", default_value_t = 0)]
    workers: usize,

    /// Leave the timestamp line out of output headers.
    #[arg(long, global = true)]
    no_timestamp: bool,

    #[command(flatten)]
    quad: QuadArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct QuadArgs {
    #[arg(long, global = true, default_value_t = QuadConfig::default().abs_tol)]
    abs_tol: f64,
    #[arg(long, global = true, default_value_t = QuadConfig::default().rel_tol)]
    rel_tol: f64,
    #[arg(long, global = true, default_value_t = QuadConfig::default().max_panels)]
    max_panels: usize,
}

impl QuadArgs {
    fn config(&self) -> Result<QuadConfig, Error> {
        let cfg = QuadConfig {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_panels: self.max_panels,
            ..QuadConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = ScanGrid::default().r_min)]
    r_min: f64,
    #[arg(long, default_value_t = ScanGrid::default().r_max)]
    r_max: f64,
    #[arg(long, default_value_t = ScanGrid::default().r_per_decade)]
    per_decade: usize,
    #[arg(long, default_value_t = ScanGrid::default().theta_count)]
    thetas: usize,
}

impl GridArgs {
    fn grid(&self) -> ScanGrid {
        ScanGrid {
            r_min: self.r_min,
            r_max: self.r_max,
            r_per_decade: self.per_decade,
            theta_count: self.thetas,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the transform at one frequency.
    Transform {
        #[arg(long)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        /// Print a JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Scan r^{3/2}|transform| and estimate the envelope constant.
    Envelope {
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        grid: GridArgs,
        /// CSV destination; stdout when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Values along the stationary-phase witness sequence.
    Sequence {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 200)]
        n_max: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Fit the blow-up exponent of the envelope as p approaches 1.
    Fit {
        #[arg(long, value_delimiter = ',', default_values_t = [1.05, 1.1, 1.2, 1.3, 1.4])]
        p_list: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        n_ref: usize,
    },
    /// Compare the envelope of a convex body with the curvature bound.
    Conjecture {
        /// Body definition JSON.
        #[arg(long)]
        body: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run a named verification suite, or `all`.
    Verify { suite: String },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Quadrature(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. }
            | Error::NonFiniteIntegrand { .. }
            | Error::NonFinite { .. }
            | Error::TooManyFailures { .. } => Failure::Quadrature(e.to_string()),
            Error::InvalidExponent(_)
            | Error::Domain { .. }
            | Error::Config(_)
            | Error::InsufficientPoints { .. } => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

#[derive(Serialize)]
struct TransformSummary {
    p: f64,
    alpha: f64,
    beta: f64,
    value: f64,
    err_estimate: f64,
    method: &'static str,
}

#[derive(Serialize)]
struct EnvelopeSummary {
    #[serde(flatten)]
    run: EnvelopeRun,
    c_est: f64,
    argmax_r: f64,
    argmax_theta: f64,
    upper_bound: Option<f64>,
    pass: Option<bool>,
    slack_ratio: Option<f64>,
    v_of_p: Option<f64>,
    samples: usize,
    failed: usize,
}

#[derive(Serialize)]
struct FitSummary {
    #[serde(flatten)]
    run: FitRun,
    #[serde(flatten)]
    fit: FitResult,
}

#[derive(Serialize)]
struct ConjectureSummary {
    #[serde(flatten)]
    report: ConjectureReport,
    #[serde(flatten)]
    body: BodyKind,
    #[serde(flatten)]
    grid: ScanGrid,
    #[serde(flatten)]
    quad: QuadConfig,
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn validate_range(grid: &ScanGrid) -> Result<(), Failure> {
    if !(grid.r_max > grid.r_min) {
        return Err(Failure::Usage(format!(
            "empty radius range [{}, {}]",
            grid.r_min, grid.r_max
        )));
    }
    grid.validate()?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let cfg = cli.quad.config()?;
    let stamp = !cli.no_timestamp;
    let workers = cli.workers;
    match cli.command {
        Command::Transform { p, alpha, beta, json } => {
            let t = chi_hat_lp(PExponent::new(p)?, Frequency::cartesian(alpha, beta), &cfg)?;
            if json {
                let s = TransformSummary {
                    p,
                    alpha,
                    beta,
                    value: t.value,
                    err_estimate: t.err_estimate,
                    method: t.method.as_str(),
                };
                println!("{}", serde_json::to_string(&s)?);
            } else {
                println!(
                    "value={} err_estimate={} method={}",
                    t.value,
                    t.err_estimate,
                    t.method.as_str()
                );
            }
            Ok(0)
        }
        Command::Envelope { p, grid, output } => {
            let grid = grid.grid();
            validate_range(&grid)?;
            let pe = PExponent::new(p)?;
            let rg = log_grid(grid.r_min, grid.r_max, grid.r_per_decade);
            let tg = theta_grid(pe, grid.theta_count);
            let rep = with_workers(workers, || envelope_scan(pe, &rg, &tg, &cfg))?;
            let run = EnvelopeRun { p, grid, quad: cfg };
            emit(output.as_deref(), &envelope_csv(&run, &rep.samples, stamp)?)?;
            let check = upper_bound_check(pe, rep.c_est).ok();
            let summary = EnvelopeSummary {
                run,
                c_est: rep.c_est,
                argmax_r: rep.argmax_r,
                argmax_theta: rep.argmax_theta,
                upper_bound: check.map(|c| c.bound),
                pass: check.map(|c| c.pass),
                slack_ratio: check.map(|c| c.slack_ratio),
                v_of_p: (!pe.is_special()).then(|| v_of_p(pe)),
                samples: rep.samples.len(),
                failed: rep.failed.len(),
            };
            let line = serde_json::to_string(&summary)?;
            if output.is_some() {
                println!("{line}");
            } else {
                eprintln!("{line}");
            }
            Ok(if check.map_or(true, |c| c.pass) { 0 } else { EXIT_FAILURE })
        }
        Command::Sequence { p, n_min, n_max, output } => {
            let pe = PExponent::new(p)?;
            let spec = stationary_sequence(pe, n_min, n_max)?;
            let points = with_workers(workers, || sequence_values(pe, &spec, &cfg))?;
            let run = SequenceRun {
                p,
                n_min,
                n_max,
                quad: cfg,
            };
            emit(output.as_deref(), &sequence_csv(&run, &points, v_of_p(pe), stamp)?)?;
            Ok(0)
        }
        Command::Fit { p_list, n_ref } => {
            let fit = with_workers(workers, || blowup_fit(&p_list, n_ref, &cfg))?;
            let summary = FitSummary {
                run: FitRun {
                    p_list,
                    n_ref,
                    quad: cfg,
                },
                fit,
            };
            println!("{}", serde_json::to_string(&summary)?);
            Ok(0)
        }
        Command::Conjecture { body, grid } => {
            let grid = grid.grid();
            validate_range(&grid)?;
            let text = fs::read_to_string(&body)
                .map_err(|e| Failure::Usage(format!("{}: {e}", body.display())))?;
            let spec: BodySpec = serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", body.display())))?;
            let shape = ConvexBody::from_spec(&spec)?;
            let rg = log_grid(grid.r_min, grid.r_max, grid.r_per_decade);
            let tg = body_theta_grid(&shape, grid.theta_count);
            let report = with_workers(workers, || conjecture_scan(&shape, &rg, &tg, &cfg))?;
            let ok = report.upper_ok;
            println!(
                "{}",
                serde_json::to_string(&ConjectureSummary {
                    report,
                    body: spec.kind,
                    grid,
                    quad: cfg,
                })?
            );
            if !ok {
                eprintln!(
                    "counterexample candidate: envelope exceeds the curvature bound (published lower constant {})",
                    published_lower_constant()
                );
                return Ok(EXIT_COUNTEREXAMPLE);
            }
            Ok(0)
        }
        Command::Verify { suite } => {
            let outcomes = if suite == "all" {
                verify::run_all()
            } else {
                vec![verify::run(&suite)?]
            };
            for o in &outcomes {
                println!("{}", o.line());
            }
            Ok(if outcomes.iter().all(|o| o.pass) { 0 } else { EXIT_FAILURE })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Quadrature(m) => (EXIT_QUADRATURE, m),
                Failure::Other(m) => (EXIT_FAILURE, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
