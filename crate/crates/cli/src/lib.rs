//! Command-line driver: argument definitions, run configuration and the
//! subcommands behind the `stid` binary.

pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stid_core::data::{SplitKind, SyntheticMode, SyntheticSpec};

use crate::config::RunConfig;
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "stid", version, about = "Spatial-temporal identity MLP forecaster")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by the commands that read a run configuration.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// `key = value` configuration file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Dataset CSV.
    #[arg(long, value_name = "PATH")]
    pub dataset: Option<PathBuf>,
    /// Override any config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl RunArgs {
    /// Defaults, then the config file, then `--set`, then dedicated flags.
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        for o in &self.overrides {
            config.apply_override(o)?;
        }
        if let Some(out) = &self.out {
            config.out.clone_from(out);
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(dataset) = &self.dataset {
            config.dataset = Some(dataset.clone());
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Baseline {
    /// Repeat the last F observed values.
    Hi,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, default_value = "spatial")]
    pub mode: SyntheticMode,
    /// Offset between samples that share a history.
    #[arg(long, default_value_t = 10.0)]
    pub gap: f64,
    #[arg(long, default_value_t = 14)]
    pub days: usize,
    /// Standard deviation of added Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Minutes between slots.
    #[arg(long, default_value_t = 30)]
    pub interval: u32,
    #[arg(long, default_value_t = 12)]
    pub p: usize,
    #[arg(long, default_value_t = 12)]
    pub f: usize,
    /// Slots per repeating block (default p + f).
    #[arg(long)]
    pub block: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

impl SynthArgs {
    pub fn spec(&self) -> SyntheticSpec {
        SyntheticSpec {
            num_days: self.days,
            interval_minutes: self.interval,
            history_len: self.p,
            horizon: self.f,
            block_len: self.block,
            gap: self.gap,
            noise_std: self.noise,
            seed: self.seed,
            ..SyntheticSpec::new(self.mode)
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model and report it on the test split.
    Train(RunArgs),
    /// Evaluate a checkpoint or a baseline on one split.
    Evaluate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_name = "PATH", required_unless_present = "baseline")]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value = "test")]
        split: SplitKind,
        #[arg(long, conflicts_with = "checkpoint")]
        baseline: Option<Baseline>,
    },
    /// Train the full model and each single-identity removal.
    Ablate(RunArgs),
    /// Generate a synthetic dataset whose samples collide without identities.
    Synth(SynthArgs),
    /// Mean training seconds per epoch.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 5)]
        epochs: usize,
    },
    /// Write the identity tables of a checkpoint as CSV.
    ExportEmbeddings {
        #[arg(long, value_name = "PATH")]
        checkpoint: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Train(args) => commands::cmd_train(&args.resolve()?).map(drop),
        Command::Evaluate {
            run,
            checkpoint,
            split,
            baseline,
        } => {
            let checkpoint = if baseline.is_some() { None } else { checkpoint };
            commands::cmd_evaluate(&run.resolve()?, checkpoint.as_deref(), split).map(drop)
        }
        Command::Ablate(args) => commands::cmd_ablate(&args.resolve()?).map(drop),
        Command::Synth(args) => commands::cmd_synth(&args.spec(), &args.out),
        Command::Bench { run, epochs } => commands::cmd_bench(&run.resolve()?, epochs).map(drop),
        Command::ExportEmbeddings { checkpoint, out } => commands::cmd_export_embeddings(&checkpoint, &out).map(drop),
    }
}
