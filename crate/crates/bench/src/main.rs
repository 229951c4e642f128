use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hasimoto_bench::config::{Command, ExperimentConfig};
use hasimoto_bench::{execute, BenchError};

#[derive(Parser)]
#[command(name = "hasimoto", version, about = "Curve-flow verification and equivalence experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Curvature identities, closed forms and specialization agreements.
    Verify(Args),
    /// Geometric flow against the transformed system.
    Equiv(Args),
    /// Single evolution with time series and snapshots.
    Run(Args),
    /// Self-convergence under grid refinement.
    Convergence(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON experiment configuration; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides the configuration, defaults to `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Multiplier applied to all absolute tolerances.
    #[arg(long)]
    tol_scale: Option<f64>,
    /// Seed for randomized checks.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(command: Command, args: Args) -> Result<bool, BenchError> {
    let config = match &args.config {
        Some(path) => ExperimentConfig::load(path, command)?,
        None => ExperimentConfig::default_for(command),
    }
    .with_overrides(args.seed, args.tol_scale)?;
    let out = args.out.or_else(|| config.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let (report, path) = execute(command, &config, &out)?;
    for check in &report.checks {
        println!("{}", check.line());
    }
    println!("{} {}: report written to {}", if report.passed { "PASS" } else { "FAIL" }, command.name(), path.display());
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Verify(a) => (Command::Verify, a),
        Sub::Equiv(a) => (Command::Equiv, a),
        Sub::Run(a) => (Command::Run, a),
        Sub::Convergence(a) => (Command::Convergence, a),
    };
    match run(command, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
