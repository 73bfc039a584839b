//! `smote-reg` command-line frontend.
//!
//! Every command reads an optional JSON run config, applies flag overrides,
//! writes its outputs to `--out` and finishes with `run_summary.json`.
//! Failures print `{"error": {"category": ..., "message": ...}}` on stderr and
//! exit with a category-specific code.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Overrides, RunConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "smote-reg", version, about = "SMOTE-REG augmentation, MLP regression, cross-validation and LIME")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the synthetic nanorod benchmark.
    SynthData(Common),
    /// Oversample a dataset with SMOTE-REG.
    Augment(Common),
    /// Train a model and save it.
    Train(Common),
    /// k-fold cross-validation with a results table.
    Cv(Common),
    /// Predict with a saved model.
    Predict(Common),
    /// Per-row LIME weights for a saved model.
    Explain(Common),
    /// synth-data, augment, cv, train, predict and explain in one run.
    Pipeline(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON run config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// length, width, aspect_ratio or a column name.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Rows of benchmark data to generate.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k_folds: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            out: self.out.clone(),
            target: self.target.clone(),
            input: self.input.clone(),
            model: self.model.clone(),
            n_rows: self.n,
            k_folds: self.k_folds,
            epochs: self.epochs,
        }
    }
}

type Handler = fn(&RunConfig) -> Result<(), CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, f): (&Common, Handler) = match &cli.command {
        Command::SynthData(c) => (c, commands::synth_data),
        Command::Augment(c) => (c, commands::augment),
        Command::Train(c) => (c, commands::train_model),
        Command::Cv(c) => (c, commands::cv),
        Command::Predict(c) => (c, commands::predict),
        Command::Explain(c) => (c, commands::explain),
        Command::Pipeline(c) => (c, commands::pipeline),
    };
    let cfg = RunConfig::load(common.config.as_deref(), &common.overrides())?;
    f(&cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.category.exit_code())
        }
    }
}
