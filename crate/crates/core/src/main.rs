use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rosalin::harness::{self, ConfigFile, ExperimentConfig, HarnessError, Mode, OptimizerKind, StrategyList};
use rosalin::sampling::Strategy;

#[derive(Parser)]
#[command(name = "rosalin", version, about = "Shot-frugal Hamiltonian estimation and optimization benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare analytic and empirical estimator variances over a shot grid.
    VarianceSweep(Flags),
    /// Run Rosalin or Adam from random starting points and record ΔE.
    Optimize(Flags),
}

#[derive(Args)]
struct Flags {
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Hamiltonian file, one `coefficient PAULISTRING` per line.
    #[arg(long)]
    hamiltonian: Option<PathBuf>,
    /// Number of entangling blocks in the ansatz.
    #[arg(long)]
    depth: Option<usize>,
    /// Sampling strategy; repeat or separate with commas for several.
    #[arg(long, value_delimiter = ',')]
    strategy: Vec<Strategy>,
    #[arg(long)]
    optimizer: Option<OptimizerKind>,
    /// Total shots (optimize) or largest grid point (variance-sweep).
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Measure qubit-wise commuting groups together.
    #[arg(long)]
    group_qwc: bool,
    /// Output CSV; optimize also writes `<stem>_aggregate.csv`. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Flags {
    fn into_config(self, mode: Mode) -> Result<ExperimentConfig, HarnessError> {
        let base = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let overrides = ConfigFile {
            hamiltonian: self.hamiltonian,
            depth: self.depth,
            strategy: (!self.strategy.is_empty()).then_some(StrategyList::Many(self.strategy)),
            optimizer: self.optimizer,
            budget: self.budget,
            trials: self.trials,
            seed: self.seed,
            group_qwc: self.group_qwc.then_some(true),
            out: self.out,
            ..ConfigFile::default()
        };
        ExperimentConfig::resolve(mode, base.overlay(overrides))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, flags) = match cli.command {
        Command::VarianceSweep(f) => (Mode::VarianceSweep, f),
        Command::Optimize(f) => (Mode::Optimize, f),
    };
    match flags.into_config(mode).and_then(|c| harness::run(&c)) {
        Ok(output) => {
            let _ = std::io::stdout().write_all(output.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
