//! Command-line front end for the fbcc pipeline.
//!
//! Subcommands cover the full chain: design or learn a filter bank, extract
//! per-utterance features, fit the class-conditional mixture models, score,
//! and evaluate. Artifact-producing runs leave a `*.run.json` provenance
//! record beside their output.

use std::ffi::OsString;

use anyhow::Context;
use clap::Parser;

pub mod commands;
pub mod opts;
pub mod presets;
pub mod sidecar;

#[derive(Debug, Parser)]
#[command(
    name = "fbcc",
    version,
    about = "Filter-bank cepstral features and spoofed-speech detection pipeline"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Subcommand)]
pub enum Command {
    /// Design a fixed filter bank and write it as CSV
    MakeBank(commands::bank::MakeBankArgs),
    /// Turn a manifest of WAV files into per-utterance feature files
    Extract(commands::extract::ExtractArgs),
    /// Train the constrained filter-bank network on power spectra
    TrainFbnn(commands::train_fbnn::TrainFbnnArgs),
    /// Write the effective filter bank of a trained network as CSV
    ExportLearnedBank(commands::bank::ExportLearnedBankArgs),
    /// Fit a diagonal-covariance GMM to one class's pooled features
    TrainGmm(commands::train_gmm::TrainGmmArgs),
    /// Score every utterance in a manifest against a human/spoof model pair
    Score(commands::score::ScoreArgs),
    /// Compute per-attack EERs and group averages from a score file
    Eval(commands::eval::EvalArgs),
    /// Summarize a pipeline artifact as JSON on stdout
    Inspect(commands::inspect::InspectArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::MakeBank(_) => "make-bank",
            Command::Extract(_) => "extract",
            Command::TrainFbnn(_) => "train-fbnn",
            Command::ExportLearnedBank(_) => "export-learned-bank",
            Command::TrainGmm(_) => "train-gmm",
            Command::Score(_) => "score",
            Command::Eval(_) => "eval",
            Command::Inspect(_) => "inspect",
        }
    }
}

/// Run one parsed subcommand. Failures carry the stage name.
pub fn run(command: Command) -> anyhow::Result<()> {
    let stage = command.name();
    let result = match command {
        Command::MakeBank(args) => commands::bank::make_bank(&args),
        Command::Extract(args) => commands::extract::run(&args),
        Command::TrainFbnn(args) => commands::train_fbnn::run(&args),
        Command::ExportLearnedBank(args) => commands::bank::export_learned_bank(&args),
        Command::TrainGmm(args) => commands::train_gmm::run(&args),
        Command::Score(args) => commands::score::run(&args),
        Command::Eval(args) => commands::eval::run(&args),
        Command::Inspect(args) => commands::inspect::run(&args),
    };
    result.with_context(|| format!("{stage} stage failed"))
}

/// Parse and run, returning the process exit code: 0 on success, 1 when a
/// stage fails, 2 for usage errors (help and version print with 0).
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    }
}
