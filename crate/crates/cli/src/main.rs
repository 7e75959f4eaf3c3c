//! `adagcn`: train, evaluate and benchmark boosted GCN ensembles.

mod args;
mod commands;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "adagcn",
    version,
    about = "Boosted graph convolutional networks for imbalanced node classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train one GCN or AdaGCN ensemble and write a checkpoint.
    Train(commands::train::TrainArgs),
    /// Score a checkpoint on a split of a dataset.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Run a multi-seed experiment or sweep from a spec.
    Sweep(commands::sweep::SweepArgs),
    /// Generate a stochastic-block-model dataset directory.
    GenFixture(commands::fixture::FixtureArgs),
    /// Validate a dataset directory and optionally convert its feature format.
    ConvertCheck(commands::check::CheckArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => commands::train::run(a),
        Command::Evaluate(a) => commands::evaluate::run(a),
        Command::Sweep(a) => commands::sweep::run(a),
        Command::GenFixture(a) => commands::fixture::run(a),
        Command::ConvertCheck(a) => commands::check::run(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}
