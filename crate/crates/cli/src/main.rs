//! `finsler-hardy <subcommand> --config <path> [--out <path>] [--format json|csv] [--seed N]`
//!
//! Exit codes: 0 success, 1 verdict failure, 2 config error, 3 numeric failure.

mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) | CliError::Output(_) => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "finsler-hardy", version, about = "Randers curvature checks, Riccati pairs, Hardy quotients and sharpness sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Overrides the seed of the config file.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form ray curvature against the engine, with the family's bounds.
    Curvature(Common),
    /// Riccati residual of a pair on a log grid.
    Riccati(Common),
    /// One Hardy quotient for explicit knots, optionally cross-checked by Monte Carlo.
    Quotient(Common),
    /// Quotients over a δ schedule with verdicts and decay fits.
    Sweep(Common),
    /// Runs the pre-registered sweeps and writes the baseline.
    Oracle(Common),
}

/// Rendered artifact and whether every verdict passed.
pub struct Outcome {
    pub body: String,
    pub passed: bool,
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, body: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let err = |e: std::io::Error| CliError::Output(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(body.as_bytes()).map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (common, outcome) = match cli.command {
        Command::Curvature(c) => {
            let o = commands::curvature(&c.config, c.format, c.seed)?;
            (c, o)
        }
        Command::Riccati(c) => {
            let o = commands::riccati(&c.config, c.format, c.seed)?;
            (c, o)
        }
        Command::Quotient(c) => {
            let o = commands::quotient(&c.config, c.format, c.seed)?;
            (c, o)
        }
        Command::Sweep(c) => {
            let o = commands::sweep(&c.config, c.format, c.seed)?;
            (c, o)
        }
        Command::Oracle(c) => {
            let o = commands::oracle(&c.config, c.format, c.seed)?;
            (c, o)
        }
    };
    match &common.out {
        Some(path) => write_atomic(path, &outcome.body)?,
        None => std::io::stdout().write_all(outcome.body.as_bytes()).map_err(|e| CliError::Output(e.to_string()))?,
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            log::warn!("verdict failure");
            ExitCode::from(1)
        }
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
