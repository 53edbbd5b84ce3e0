//! `hyperhd`: train, evaluate, run, profile and export binary hypervector
//! image classifiers.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{ConfigFile, Format, RunArgs, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "hyperhd", version, about = "Binary hypervector image classification")]
struct Cli {
    /// Flat `key = value` file supplying defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Report format [default: text].
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encode a training set, learn class prototypes and write a model file.
    Train(RunArgs),
    /// Report accuracy, confusion matrix and timings on a test set.
    Eval(RunArgs),
    /// Classify one PGM image.
    Predict(RunArgs),
    /// Time the encoding phases and count operations for one image.
    Profile(RunArgs),
    /// Write a model as a C header and print its flash estimate.
    Export(RunArgs),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("HYPERHD_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("HYPERHD_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} worker threads: {e}")))
}

type Handler = fn(&RunConfig) -> Result<(), CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let (args, command): (RunArgs, Handler) = match cli.command {
        Command::Train(a) => (a, commands::train),
        Command::Eval(a) => (a, commands::eval),
        Command::Predict(a) => (a, commands::predict),
        Command::Profile(a) => (a, commands::profile),
        Command::Export(a) => (a, commands::export),
    };
    let cfg = RunConfig::resolve(args, cli.format, &file)?;
    command(&cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
