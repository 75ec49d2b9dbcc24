//! Command-line surface: generate synthetic data, run cross-validation,
//! train a single model, score raw notes, and run the numeric self-checks.
//!
//! Exit codes: 0 success, 2 usage, 3 data/format, 4 numeric failure.

mod commands;
mod config;
mod manifest;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "hypodx", version, about = "Hypoglycemia sentence detection pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic labeled corpus, embeddings, and manifest.
    Gen(commands::gen::GenArgs),
    /// 10-fold cross-validation for one model kind.
    Cv(commands::cv::CvArgs),
    /// Train one model on a single train/dev/test split and save it.
    Train(commands::train::TrainArgs),
    /// Score the sentences of raw notes with a trained checkpoint.
    Predict(commands::predict::PredictArgs),
    /// Finite-difference checks over every differentiable layer.
    GradCheck(commands::checks::GradCheckArgs),
    /// Compare the fast metric implementations against their
    /// quadratic-time oracles on random instances.
    MetricsOracle(commands::checks::MetricsOracleArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => commands::gen::run(args),
        Command::Cv(args) => commands::cv::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Predict(args) => commands::predict::run(args),
        Command::GradCheck(args) => commands::checks::run_grad_check(args),
        Command::MetricsOracle(args) => commands::checks::run_metrics_oracle(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
