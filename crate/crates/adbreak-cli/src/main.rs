//! `adbreak`: detect advertising regions in broadcast TV audio.
//!
//! Exit codes: 0 success; 2 bad input or file format (including usage
//! errors); 3 insufficient data for the requested operation; 4 internal
//! error.

mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CrossvalArgs, DetectArgs, EvaluateArgs, ExportEnergyArgs, SynthArgs, TrainArgs};

#[derive(Parser)]
#[command(
    name = "adbreak",
    version,
    about = "Detect advertising regions in broadcast TV audio via boundary silences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect advertising regions in a WAV recording using a trained model.
    Detect(DetectArgs),
    /// Train a boundary-silence model from annotated recordings.
    Train(TrainArgs),
    /// Leave-one-programme-out cross-validation over an annotated corpus.
    Crossval(CrossvalArgs),
    /// Score a detected region file against ground-truth annotations.
    Evaluate(EvaluateArgs),
    /// Generate deterministic synthetic broadcast audio with ground truth.
    Synth(SynthArgs),
    /// Export the per-frame energy track of a recording as CSV.
    ExportEnergy(ExportEnergyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Detect(args) => commands::run_detect(args),
        Command::Train(args) => commands::run_train(args),
        Command::Crossval(args) => commands::run_crossval(args),
        Command::Evaluate(args) => commands::run_evaluate(args),
        Command::Synth(args) => commands::run_synth(args),
        Command::ExportEnergy(args) => commands::run_export_energy(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
