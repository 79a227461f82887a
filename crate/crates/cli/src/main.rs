//! `qdim`: quantization dimension of self-similar measures from the shell.

mod commands;
mod error;
mod input;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "qdim", version, about = "Quantization dimension toolkit for self-similar measures")]
struct Cli {
    /// Write results here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the dimension equation over one order or a grid (CSV).
    Dim(commands::DimArgs),
    /// Check strong separation (or sufficient OSC) of composed maps (JSON).
    CheckSep(commands::CheckSepArgs),
    /// Search levels for a strongly separated sub-system (JSON).
    SubifsSearch(commands::SearchArgs),
    /// Optimize one codebook on chaos-game samples (JSON).
    Quantize(commands::QuantizeArgs),
    /// Fit the empirical quantization dimension over a codebook ladder (CSV).
    Estimate(commands::EstimateArgs),
    /// Operations on discrete measures.
    Measure(commands::MeasureArgs),
    /// Run the built-in checks and print PASS/FAIL for each.
    Verify(verify::VerifyArgs),
}

/// Caps the rayon pool at `QDIM_THREADS` when set.
fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("QDIM_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| CliError::invalid("QDIM_THREADS", format!("expected a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    let text = match &cli.command {
        Command::Dim(a) => commands::dim(a)?,
        Command::CheckSep(a) => commands::check_sep(a)?,
        Command::SubifsSearch(a) => commands::subifs_search(a)?,
        Command::Quantize(a) => commands::quantize(a)?,
        Command::Estimate(a) => commands::estimate(a)?,
        Command::Measure(a) => commands::measure(a)?,
        Command::Verify(a) => verify::verify(a)?,
    };
    input::emit(cli.output.as_deref(), &text)
}

fn main() -> ExitCode {
    // clap exits with status 2 on malformed arguments
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qdim: {e}");
            e.exit_code()
        }
    }
}
