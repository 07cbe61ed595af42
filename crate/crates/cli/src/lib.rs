//! Command-line driver: simulation ensembles, dataset generation, scenario
//! training and cross-run reports.
//!
//! Every command writes deterministic artifacts plus a `manifest.json`
//! carrying timestamps and the configuration hash.

pub mod commands;
mod error;
pub mod io;
pub mod manifest;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use molcl::cl::StrategyKind;

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "molcl",
    version,
    about = "Molecular SW-ARQ simulation and continual-learning RTT estimation"
)]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub parallelism: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation ensemble and report RTT statistics.
    Simulate(SimulateArgs),
    /// Generate per-task train/test CSVs from a task sequence.
    Dataset(DatasetArgs),
    /// Train one strategy through a task sequence.
    Train(TrainArgs),
    /// Summarize finished training runs across strategies and seeds.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Task-sequence JSON.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training JSON (sequence, data directory, optimizer, hyperparameters).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: StrategyKind,
    /// Overrides the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Continue from the newest checkpoint in `--out`.
    #[arg(long)]
    pub resume: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Output directories of `train` runs.
    #[arg(required = true)]
    pub runs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_strategy(s: &str) -> Result<StrategyKind, String> {
    s.parse().map_err(|e: molcl::cl::UnknownStrategy| e.to_string())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.parallelism {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--parallelism: {e}")))?;
    }
    match cli.command {
        Command::Simulate(a) => commands::simulate(&a).map(|_| ()),
        Command::Dataset(a) => commands::dataset(&a).map(|_| ()),
        Command::Train(a) => commands::train(&a).map(|_| ()),
        Command::Report(a) => commands::report(&a).map(|_| ()),
    }
}
