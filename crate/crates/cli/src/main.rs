//! `approx-sense`: experiment driver for approximation-sensitivity-aware learning.
//!
//! Errors go to stderr as one JSON object `{"error": {"code", "message"}}`.
//! Exit codes: 0 success, 1 runtime failure, 2 bad invocation or config,
//! 3 a validation suite ran but did not pass.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use approx_sense::Execution;
use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand};

use crate::commands::{Context, RadMethodArg, RadSource};
use crate::config::LoadedConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "approx-sense", version, about = "Sensitivity-aware learning experiments")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Top-level seed; overrides the config's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config's `output_dir` (default `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true, env = "APPROX_SENSE_THREADS")]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the configured learner and write `train.json`.
    Train,
    /// Estimate the sensitivity of a hypothesis and write `sensitivity.json`.
    Sensitivity,
    /// Rademacher complexity of a geometry model or a sensitivity point set.
    Rademacher(RademacherArgs),
    /// Evaluate the configured bounds; writes `bounds.json` and appends to `bounds.csv`.
    Bound,
    /// Run a validation suite; writes `validate_<suite>.json` and appends to `coverage.csv`.
    Validate(ValidateArgs),
    /// Draw the synthetic samples and write them as CSV.
    Generate,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["geometry", "pointset"])))]
struct RademacherArgs {
    /// Geometry model JSON.
    #[arg(long)]
    geometry: Option<PathBuf>,
    /// Point set CSV, one sensitivity vector per row.
    #[arg(long)]
    pointset: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = RadMethodArg::Auto)]
    method: RadMethodArg,
    /// Sign vectors for the Monte Carlo method.
    #[arg(long, default_value_t = 10_000)]
    n_sigma: usize,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Suite name, e.g. `lemma1` or `ellipse_exact`.
    suite: String,
    /// Number of trials; defaults to the config's `trials`, then to the suite default.
    #[arg(long)]
    trials: Option<usize>,
}

fn configure_threads(threads: Option<usize>) -> CliResult<()> {
    match threads {
        None => Ok(()),
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        #[cfg(feature = "parallel")]
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}"))),
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(()),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads(cli.global.threads)?;
    let config = cli.global.config.as_deref().map(LoadedConfig::load).transpose()?;
    let seed = cli
        .global
        .seed
        .or(config.as_ref().map(|c| c.config.seed))
        .unwrap_or(0);
    let out = cli
        .global
        .out
        .or_else(|| {
            config
                .as_ref()
                .and_then(|c| c.config.output_dir.as_ref().map(|d| c.resolve(d)))
        })
        .unwrap_or_else(|| PathBuf::from("out"));
    let ctx = Context {
        config,
        seed,
        out,
        exec: Execution::default(),
    };
    let written = match cli.command {
        Command::Train => commands::train(&ctx)?,
        Command::Sensitivity => commands::sensitivity(&ctx)?,
        Command::Generate => commands::generate(&ctx)?,
        Command::Bound => {
            let (paths, reports) = commands::bound(&ctx)?;
            for r in &reports {
                println!("{}: {} (certified: {})", r.name, r.value, r.certified);
            }
            paths
        }
        Command::Rademacher(args) => {
            let source = match (&args.geometry, &args.pointset) {
                (Some(g), _) => RadSource::Geometry(g),
                (None, Some(p)) => RadSource::Pointset(p),
                (None, None) => unreachable!("clap enforces one source"),
            };
            let (paths, est) = commands::rademacher(&ctx, source, args.method, args.n_sigma)?;
            println!("rademacher: {}", est.value);
            paths
        }
        Command::Validate(args) => {
            let (paths, report) = commands::validate(&ctx, &args.suite, args.trials)?;
            println!(
                "[{}] {}: coverage {} ({} of {} violated, required {}), mean slack {}",
                if report.passed { "PASS" } else { "FAIL" },
                report.suite,
                report.coverage,
                report.violations,
                report.trials,
                report.required,
                report.mean_slack
            );
            if !report.passed {
                return Err(CliError::ValidationFailed {
                    suite: report.suite,
                    violations: report.violations,
                    trials: report.trials,
                    coverage: report.coverage,
                    required: report.required,
                });
            }
            paths
        }
    };
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or_default();
            let message = first.strip_prefix("error: ").unwrap_or(first).to_owned();
            eprintln!("{}", CliError::Usage(message).to_json());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
