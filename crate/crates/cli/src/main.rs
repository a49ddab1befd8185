//! Command-line front end: coverage curves, mean rates, access-fraction
//! optimization, Monte Carlo validation and parameter sweeps, all driven by a
//! JSON experiment configuration.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for numeric
//! failures inside the engine.

mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ExperimentConfig, RunKind};

#[derive(Parser)]
#[command(
    name = "mmtdd",
    version,
    about = "Coverage and rate analysis for two-hop self-backhauled mmWave TDD networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV/JSON results.
    #[arg(long, default_value = "out")]
    output: PathBuf,
    /// Override the Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the Monte Carlo drop count.
    #[arg(long)]
    drops: Option<u32>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    parallelism: Option<usize>,
    /// Reproduce the printed formulas verbatim (no log2 conversion factor,
    /// printed DL backhaul poaching gain).
    #[arg(long)]
    strict_paper: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Analytical SINR coverage curves.
    Coverage(CommonArgs),
    /// Mean UL/DL/overall user rates.
    Rate(CommonArgs),
    /// Sweep the access fraction and report the optimum.
    OptimizeDelta(CommonArgs),
    /// Paired analytical and Monte Carlo coverage with gap summary.
    McValidate(CommonArgs),
    /// Rate table over the configured parameter grid.
    Sweep(CommonArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MMTDD_LOG", "info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let (args, kind) = match &cli.command {
        Command::Coverage(a) => (a, RunKind::Coverage),
        Command::Rate(a) => (a, RunKind::Rate),
        Command::OptimizeDelta(a) => (a, RunKind::OptimizeDelta),
        Command::McValidate(a) => (a, RunKind::McValidate),
        Command::Sweep(a) => (a, RunKind::Sweep),
    };
    match run_command(args, kind) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            // Numeric failures inside the engine exit 3; everything that
            // went wrong before the math started exits 2.
            let numeric = e
                .chain()
                .any(|c| matches!(c.downcast_ref::<mmtdd_core::Error>(), Some(mmtdd_core::Error::Numeric { .. })));
            if numeric {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run_command(args: &CommonArgs, kind: RunKind) -> anyhow::Result<()> {
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    cfg.run = kind;
    if let Some(seed) = args.seed {
        cfg.mc.seed = seed;
    }
    if let Some(drops) = args.drops {
        cfg.mc.drops = drops;
    }
    if let Some(par) = args.parallelism {
        cfg.parallelism = par;
    }
    if args.strict_paper {
        cfg.strict_paper = true;
    }
    cfg.validate()?;
    if cfg.parallelism > 0 {
        rayon_pool(cfg.parallelism)?;
    }
    run::execute(&cfg, &args.output)
}

fn rayon_pool(threads: usize) -> anyhow::Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| anyhow::anyhow!("thread pool: {e}"))
}
