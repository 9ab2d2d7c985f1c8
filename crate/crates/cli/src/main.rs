//! `rnmf`: robust nonnegative matrix factorization from the command line.
//!
//! Exit codes: 0 success, 2 usage errors (bad flags), 1 runtime failures.

use clap::{Parser, Subcommand};

use rnmf_cli::commands;
use rnmf_cli::error::CliError;

#[derive(Parser)]
#[command(
    name = "rnmf",
    version,
    about = "Nonnegative matrix factorization with sparse outlier estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a factorization to a CSV matrix and save the factors
    Factorize(commands::factorize::FactorizeArgs),
    /// Locate corrupted entries of a CSV matrix
    Detect(commands::detect::DetectArgs),
    /// Denoise a PGM image patch by patch
    Denoise(commands::denoise::DenoiseArgs),
    /// Run a benchmark suite and emit its CSV table
    Bench(commands::bench::BenchArgs),
    /// Replay a run from its manifest
    Rerun(commands::rerun::RerunArgs),
}

fn main() {
    let cli = Cli::parse();
    let result: Result<(), CliError> = match &cli.command {
        Command::Factorize(args) => commands::factorize::run(args),
        Command::Detect(args) => commands::detect::run(args),
        Command::Denoise(args) => commands::denoise::run(args),
        Command::Bench(args) => commands::bench::run(args),
        Command::Rerun(args) => commands::rerun::run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
