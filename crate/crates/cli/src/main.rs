//! `chgeo`: curvature evaluation, mode surveys, geodesic evolution and the
//! randomized verification suites.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use chgeo_core::flow::FlowError;
use clap::{Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("degenerate plane: {0}")]
    Degenerate(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{failed} verification suite(s) failed")]
    VerifyFailed { failed: usize },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Malformed(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Runtime(_) | CliError::VerifyFailed { .. } => 1,
        }
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::InvalidConfig(_) => CliError::Malformed(e.to_string()),
            FlowError::BlowUp { .. } => CliError::Runtime(format!(
                "{e} (guard threshold is a fixed numerical choice, not a proven breaking criterion)"
            )),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "chgeo",
    version,
    about = "Geometry of the two-component Camassa-Holm system with vorticity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Io {
    /// Input JSON file.
    #[arg(long)]
    input: PathBuf,
    /// Output file.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Curvature report for the plane spanned by two algebra elements.
    Curvature(Io),
    /// Sectional curvature of cosine-mode planes over a grid (CSV plus `.dat`).
    Survey(Io),
    /// Integrate the geodesic equation and write diagnostics (CSV plus `.dat`).
    Evolve(Io),
    /// Run the seeded verification suites and write a JSON summary.
    Verify {
        /// Optional JSON file with `seed` and `tolerances`; flags take precedence.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Tolerance override, repeatable.
        #[arg(long = "tol", value_name = "NAME=VALUE", value_parser = parse_tol)]
        tol: Vec<(String, f64)>,
    },
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value: f64 = value
        .parse()
        .map_err(|e| format!("bad tolerance `{value}`: {e}"))?;
    if value.is_nan() || value < 0.0 {
        return Err(format!("tolerance must be non-negative, got {value}"));
    }
    Ok((name.to_string(), value))
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("CHGEO_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Malformed(format!(
            "CHGEO_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Curvature(io) => commands::curvature(&io.input, &io.output),
        Command::Survey(io) => commands::survey(&io.input, &io.output),
        Command::Evolve(io) => commands::evolve(&io.input, &io.output),
        Command::Verify {
            input,
            output,
            seed,
            tol,
        } => commands::verify(input.as_deref(), &output, seed, tol),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chgeo: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
