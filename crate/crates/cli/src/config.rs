//! Command-line options, the optional JSON config file, and the resolved
//! run configuration.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use lissajous_core::quantum::MIN_GRID_SIZE;
use lissajous_core::{CouplingParams, EnergyData, Variant};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 20140101;
pub const DEFAULT_DT: f64 = 1e-4;
pub const DEFAULT_GRID_SIZE: usize = 2000;
pub const DEFAULT_MAX_S: f64 = 12.0;
pub const DEFAULT_SAMPLES: usize = 2001;
pub const DEFAULT_PERIODS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Verify,
    Spectrum,
    Degeneracy,
    Trajectory,
    Orbit,
    Plot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Orbit,
    Trajectory,
}

/// Every knob, optional so that a config file can fill the gaps.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// Coupling as a fraction m/n
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Defaults to 1 for the two-parameter system, 0 otherwise
    #[arg(long)]
    pub beta: Option<f64>,
    /// one | two
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub e_theta: Option<f64>,
    #[arg(long)]
    pub e_phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi0: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Integration steps; defaults to ten theta periods
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub grid_size: Option<usize>,
    #[arg(long)]
    pub max_s: Option<f64>,
    /// Points along a synthesized orbit
    #[arg(long)]
    pub samples: Option<usize>,
    /// Random-state seed for verify
    #[arg(long, env = "TOOLKIT_SEED")]
    pub seed: Option<u64>,
    /// Number of random states per identity
    #[arg(long)]
    pub states: Option<usize>,
    #[arg(long)]
    pub mu: Option<u32>,
    #[arg(long)]
    pub nu: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Plot against phi/k instead of the dilated angle
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub true_coords: bool,
    /// What the plot draws
    #[arg(long, value_enum)]
    pub source: Option<Source>,
}

impl Options {
    /// Fills unset fields from `base`; set fields win.
    pub fn over(self, base: Options) -> Options {
        Options {
            k: self.k.or(base.k),
            alpha: self.alpha.or(base.alpha),
            beta: self.beta.or(base.beta),
            variant: self.variant.or(base.variant),
            e_theta: self.e_theta.or(base.e_theta),
            e_phi: self.e_phi.or(base.e_phi),
            phi0: self.phi0.or(base.phi0),
            dt: self.dt.or(base.dt),
            steps: self.steps.or(base.steps),
            grid_size: self.grid_size.or(base.grid_size),
            max_s: self.max_s.or(base.max_s),
            samples: self.samples.or(base.samples),
            seed: self.seed.or(base.seed),
            states: self.states.or(base.states),
            mu: self.mu.or(base.mu),
            nu: self.nu.or(base.nu),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            true_coords: self.true_coords || base.true_coords,
            source: self.source.or(base.source),
        }
    }

    pub fn from_file(path: &Path) -> Result<Options, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Parses `m/n`, or a bare integer `m`.
pub fn parse_k(text: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Config(format!("--k expects m/n with positive integers, got '{text}'"));
    let (m, n) = match text.split_once('/') {
        Some((m, n)) => (m.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?),
        None => (text.trim().parse().map_err(|_| bad())?, 1),
    };
    Ok((m, n))
}

/// Fully resolved configuration, embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub params: CouplingParams,
    pub e_theta: Option<f64>,
    pub e_phi: Option<f64>,
    pub phi0: Option<f64>,
    pub dt: f64,
    pub steps: Option<usize>,
    pub grid_size: usize,
    pub max_s: f64,
    pub samples: usize,
    pub seed: u64,
    pub states: usize,
    pub mu: Option<u32>,
    pub nu: Option<u32>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub true_coords: bool,
    pub source: Source,
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("--{name} must be positive, got {v}")))
    }
}

fn nonzero(name: &str, v: usize) -> Result<usize, CliError> {
    if v > 0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("--{name} must be positive")))
    }
}

impl RunConfig {
    pub fn resolve(command: Command, opts: Options) -> Result<RunConfig, CliError> {
        let variant: Variant = match &opts.variant {
            Some(v) => v.parse().map_err(|e| CliError::Config(format!("{e}")))?,
            None => Variant::TwoParameter,
        };
        let (m, n) = parse_k(opts.k.as_deref().unwrap_or("1/1"))?;
        let alpha = opts.alpha.unwrap_or(1.0);
        let beta = opts.beta.unwrap_or(match variant {
            Variant::TwoParameter => 1.0,
            Variant::OneParameter => 0.0,
        });
        let params = CouplingParams::new(m, n, alpha, beta, variant).map_err(|e| CliError::Config(e.to_string()))?;
        let default_format = match command {
            Command::Plot => Format::Svg,
            Command::Trajectory | Command::Orbit => Format::Csv,
            _ => Format::Json,
        };
        let config = RunConfig {
            command,
            params,
            e_theta: opts.e_theta,
            e_phi: opts.e_phi,
            phi0: opts.phi0,
            dt: positive("dt", opts.dt.unwrap_or(DEFAULT_DT))?,
            steps: opts.steps.map(|s| nonzero("steps", s)).transpose()?,
            grid_size: opts.grid_size.unwrap_or(DEFAULT_GRID_SIZE),
            max_s: positive("max-s", opts.max_s.unwrap_or(DEFAULT_MAX_S))?,
            samples: opts.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: opts.seed.unwrap_or(DEFAULT_SEED),
            states: nonzero("states", opts.states.unwrap_or(100))?,
            mu: opts.mu,
            nu: opts.nu,
            out: opts.out,
            format: opts.format.unwrap_or(default_format),
            true_coords: opts.true_coords,
            source: opts.source.unwrap_or(Source::Orbit),
        };
        config.check_command()?;
        Ok(config)
    }

    fn check_command(&self) -> Result<(), CliError> {
        let allowed: &[Format] = match self.command {
            Command::Verify | Command::Spectrum | Command::Degeneracy => &[Format::Json],
            Command::Trajectory | Command::Orbit => &[Format::Csv, Format::Json],
            Command::Plot => &[Format::Svg],
        };
        if !allowed.contains(&self.format) {
            return Err(CliError::Config(format!(
                "format {:?} not available for {:?}",
                self.format, self.command
            )));
        }
        if self.grid_size < MIN_GRID_SIZE {
            return Err(CliError::Config(format!("--grid-size must be at least {MIN_GRID_SIZE}")));
        }
        if matches!(self.command, Command::Trajectory | Command::Orbit | Command::Plot) {
            for (name, v) in [("e-theta", self.e_theta), ("e-phi", self.e_phi), ("phi0", self.phi0)] {
                match v {
                    None => return Err(CliError::Config(format!("{:?} needs --{name}", self.command))),
                    Some(x) if !x.is_finite() => return Err(CliError::Config(format!("--{name} must be finite"))),
                    _ => {}
                }
            }
            if self.samples < 2 {
                return Err(CliError::Config("--samples must be at least 2".into()));
            }
        }
        if self.command == Command::Degeneracy && self.mu.is_some() != self.nu.is_some() {
            return Err(CliError::Config("degeneracy seed needs both --mu and --nu".into()));
        }
        Ok(())
    }

    /// Energies of a motion command, validated against the parameters.
    pub fn energies(&self) -> Result<EnergyData, CliError> {
        match (self.e_theta, self.e_phi) {
            (Some(e_theta), Some(e_phi)) => Ok(EnergyData::new(e_theta, e_phi, &self.params)?),
            _ => Err(CliError::Config("energies not given".into())),
        }
    }
}
