//! `toolkit`: verification, spectra, degeneracy and orbit generation for
//! the Lissajous system on the sphere.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 configuration
//! error, 3 numeric failure.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lissajous_core::Error as CoreError;
use thiserror::Error;

mod commands;
mod config;
mod svg;

use config::{Command, Options, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("nothing to plot: the orbit is empty")]
    EmptyOrbit,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                CoreError::NonPositiveInteger { .. }
                | CoreError::KTooSmall { .. }
                | CoreError::BadVariant(_)
                | CoreError::InvalidEnergies(_)
                | CoreError::InvalidArgument(_)
                | CoreError::CutoffTooLarge { .. } => 2,
                _ => 3,
            },
            CliError::EmptyOrbit => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "toolkit", version, about = "Constants of motion, spectra and orbits of the Lissajous system on the sphere")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON file with any of the options below; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    options: Options,
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let options = match &cli.config {
        Some(path) => cli.options.over(Options::from_file(path)?),
        None => cli.options,
    };
    let config = RunConfig::resolve(cli.command, options)?;
    let output = commands::run(&config)?;
    match &config.out {
        Some(path) => {
            fs::write(path, &output.document)?;
            if let Some(summary) = &output.summary {
                io::stdout().write_all(summary.as_bytes())?;
            }
        }
        None => {
            io::stdout().write_all(output.document.as_bytes())?;
            if let Some(summary) = &output.summary {
                io::stderr().write_all(summary.as_bytes())?;
            }
        }
    }
    Ok(output.success)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
