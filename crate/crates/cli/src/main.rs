use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kawahara_cli::config::{default_config, ExperimentConfig, ExperimentKind};
use kawahara_cli::experiments;
use kawahara_cli::HarnessError;

/// Pseudo-spectral Kawahara/KdV experiment runner.
///
/// Exit codes: 0 = all checks pass, 1 = assertion failure, 2 = configuration
/// error.
#[derive(Parser)]
#[command(name = "kawahara", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value config file; defaults to the built-in reference
    /// scenario of the chosen experiment.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV reports and trajectory files.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Also emit SVG line plots of the report columns.
    #[arg(long)]
    plot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the equation and store trajectories.
    Simulate(RunArgs),
    /// Dispersive-limit convergence study against the third-order equation.
    Converge(RunArgs),
    /// Equi-continuity of the solution maps under data perturbations.
    Equicont(RunArgs),
    /// Dilation-symmetry dual-simulation check.
    Scaling(RunArgs),
    /// Mixed-norm probe constants of the free evolution.
    Strichartz(RunArgs),
    /// Sampled frequency-region inequality sweeps.
    Regions(RunArgs),
    /// Windowed space-time norm diagnostics.
    Xsb(RunArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Simulate(a) => (ExperimentKind::Simulate, a),
        Command::Converge(a) => (ExperimentKind::Converge, a),
        Command::Equicont(a) => (ExperimentKind::Equicont, a),
        Command::Scaling(a) => (ExperimentKind::Scaling, a),
        Command::Strichartz(a) => (ExperimentKind::Strichartz, a),
        Command::Regions(a) => (ExperimentKind::Regions, a),
        Command::Xsb(a) => (ExperimentKind::Xsb, a),
    };
    match execute(kind, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(HarnessError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(kind: ExperimentKind, args: RunArgs) -> Result<bool, HarnessError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_file(path, kind)?,
        None => default_config(kind),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    }

    println!(
        "experiment = {}  config_hash = {}  seed = {}",
        kind.name(),
        cfg.hash(),
        cfg.seed
    );
    let outcome = experiments::run(&cfg, &args.out, args.plot)?;
    for check in &outcome.checks {
        println!("{}", check.summary_line());
    }
    for file in &outcome.files {
        println!("wrote {}", file.display());
    }
    let pass = outcome.all_pass();
    println!(
        "{}: {} checks, {} failed",
        if pass { "OK" } else { "FAILED" },
        outcome.checks.len(),
        outcome.checks.iter().filter(|c| !c.pass).count()
    );
    Ok(pass)
}
