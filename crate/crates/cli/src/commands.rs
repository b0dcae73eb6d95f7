//! One function per subcommand. Each returns the bytes to emit and leaves
//! the writing to the caller.

use lissajous_core::algebra::verify::{run_verification, VerifyOptions};
use lissajous_core::algebra::{extract_phases, m_value_at, q2_constant, symmetry_x, unwrap_phase, Sign};
use lissajous_core::dynamics::{
    frequencies, initial_state, integrate, measure_periods, orbit_from_phases, turning_points, Trajectory,
};
use lissajous_core::quantum::{energy_level, enumerate_spectrum, grid_eigensolve, symmetry_orbit, GridPotential};
use lissajous_core::{CouplingParams, PhaseState, Variant};
use serde_json::{json, Value};

use crate::config::{Command, Format, RunConfig, Source, DEFAULT_PERIODS};
use crate::{svg, CliError};

/// Result of a command: the main document, an optional side summary, and
/// whether every check inside the command held.
#[derive(Debug)]
pub struct Output {
    pub document: String,
    pub summary: Option<String>,
    pub success: bool,
}

impl Output {
    fn json(value: &Value, success: bool) -> Output {
        Output {
            document: pretty(value),
            summary: None,
            success,
        }
    }
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn run(config: &RunConfig) -> Result<Output, CliError> {
    match config.command {
        Command::Verify => run_verify(config),
        Command::Spectrum => run_spectrum(config),
        Command::Degeneracy => run_degeneracy(config),
        Command::Trajectory => run_trajectory(config),
        Command::Orbit => run_orbit(config),
        Command::Plot => run_plot(config),
    }
}

/// System of the other variant used to cover both ladder families.
pub fn companion(params: &CouplingParams) -> CouplingParams {
    let (m, n) = (params.m() as i64, params.n() as i64);
    let alpha = params.alpha();
    match params.variant() {
        Variant::TwoParameter => CouplingParams::new(m, n, alpha, 0.0, Variant::OneParameter)
            .or_else(|_| CouplingParams::new(1, 1, alpha, 0.0, Variant::OneParameter))
            .expect("k = 1 is always admissible"),
        Variant::OneParameter => {
            let beta = if alpha > 0.0 { alpha } else { 1.0 };
            let alpha = if alpha > 0.0 { alpha } else { 1.0 };
            CouplingParams::new(m, n, alpha, beta, Variant::TwoParameter).expect("one-parameter k is admissible here")
        }
    }
}

pub fn run_verify(config: &RunConfig) -> Result<Output, CliError> {
    let other = companion(&config.params);
    let (two, one) = match config.params.variant() {
        Variant::TwoParameter => (config.params, other),
        Variant::OneParameter => (other, config.params),
    };
    let opts = VerifyOptions {
        seed: config.seed,
        states: config.states,
        ..VerifyOptions::default()
    };
    let report = run_verification(&two, &one, &opts)?;
    let worst = report.records.iter().map(|r| r.max_relative_error).fold(0.0, f64::max);
    let value = json!({
        "config": config,
        "companion": other,
        "records": report.records,
        "max_relative_error": worst,
        "all_pass": report.all_pass(),
    });
    Ok(Output::json(&value, report.all_pass()))
}

pub fn run_spectrum(config: &RunConfig) -> Result<Output, CliError> {
    let table = enumerate_spectrum(&config.params, config.max_s)?;
    let mut value = table.to_json();
    value["config"] = json!(config);
    value["grid_check"] = grid_check(config)?;
    Ok(Output::json(&value, true))
}

/// Lowest levels recomputed from the discretized phi and theta problems.
fn grid_check(config: &RunConfig) -> Result<Value, CliError> {
    let p = &config.params;
    let phi_potential = match p.variant() {
        Variant::TwoParameter => GridPotential::TwoParamPT {
            alpha: p.alpha(),
            beta: p.beta(),
        },
        Variant::OneParameter => GridPotential::OneParamPT { alpha: p.alpha() },
    };
    let phi = grid_eigensolve(phi_potential, config.grid_size)?;
    let mut rows = Vec::new();
    for nu in 0..GRID_LEVELS {
        let eps = phi.eigenvalues[nu as usize].sqrt();
        let theta = grid_eigensolve(GridPotential::ThetaPT { m_value: p.k() * eps }, config.grid_size)?;
        for mu in 0..GRID_LEVELS {
            let level = energy_level(mu, nu, p);
            let grid = theta.eigenvalues[mu as usize];
            rows.push(json!({
                "mu": mu,
                "nu": nu,
                "energy": level.energy,
                "grid_energy": grid,
                "relative_error": (grid - level.energy).abs() / level.energy,
            }));
        }
    }
    Ok(Value::Array(rows))
}

fn labels(levels: &[lissajous_core::quantum::QuantumLevel]) -> Vec<[u32; 2]> {
    levels.iter().map(|l| [l.mu, l.nu]).collect()
}

pub fn run_degeneracy(config: &RunConfig) -> Result<Output, CliError> {
    let p = &config.params;
    if let (Some(mu), Some(nu)) = (config.mu, config.nu) {
        let seed = energy_level(mu, nu, p);
        let orbit = symmetry_orbit(&seed, p);
        let table = enumerate_spectrum(p, seed.s())?;
        let class = table
            .class_of(mu, nu)
            .ok_or_else(|| CliError::Config(format!("level ({mu}, {nu}) missing from enumeration")))?;
        let agreement = orbit.len() == class.multiplicity() && orbit.iter().all(|l| class.contains(l.mu, l.nu));
        let value = json!({
            "config": config,
            "seed": [mu, nu],
            "s": seed.s(),
            "energy": seed.energy,
            "orbit": labels(&orbit),
            "multiplicity": class.multiplicity(),
            "agreement": agreement,
        });
        return Ok(Output::json(&value, agreement));
    }
    let table = enumerate_spectrum(p, config.max_s)?;
    let mut all = true;
    let classes: Vec<Value> = table
        .classes
        .iter()
        .map(|c| {
            let sizes: Vec<usize> = c.levels.iter().map(|l| symmetry_orbit(l, p).len()).collect();
            let agree = sizes.iter().all(|&s| s == c.multiplicity());
            all &= agree;
            json!({
                "s": c.s,
                "energy": c.energy,
                "levels": labels(&c.levels),
                "multiplicity": c.multiplicity(),
                "orbit_sizes": sizes,
                "agreement": agree,
            })
        })
        .collect();
    let value = json!({ "config": config, "classes": classes, "agreement": all });
    Ok(Output::json(&value, all))
}

fn default_steps(config: &RunConfig, periods: f64) -> Result<usize, CliError> {
    let energies = config.energies()?;
    let period = frequencies(&energies, &config.params).period_theta;
    Ok(config.steps.unwrap_or((periods * period / config.dt).ceil() as usize))
}

fn synthesize(config: &RunConfig, periods: f64) -> Result<(PhaseState, Trajectory), CliError> {
    let energies = config.energies()?;
    let start = initial_state(&energies, &config.params, config.phi0.unwrap_or(0.0))?;
    let traj = integrate(&start, &config.params, config.dt, default_steps(config, periods)?)?;
    Ok((start, traj))
}

/// Largest relative change of `X+` and `Q2+` along the trajectory.
fn constant_drift(traj: &Trajectory) -> Result<(f64, f64), CliError> {
    let p = traj.params();
    let first = &traj.samples()[0];
    let m = m_value_at(&first.state, p)?;
    let x0 = symmetry_x(&first.state, p, Sign::Plus)?;
    let q0 = q2_constant(&first.state, first.t, m, Sign::Plus)?;
    let mut drift = (0.0f64, 0.0f64);
    for s in traj.samples() {
        let x = symmetry_x(&s.state, p, Sign::Plus)?;
        let q = q2_constant(&s.state, s.t, m, Sign::Plus)?;
        drift.0 = drift.0.max((x - x0).norm() / x0.norm());
        drift.1 = drift.1.max((q - q0).norm() / q0.norm());
    }
    Ok(drift)
}

/// Net change of the unwrapped shift and ladder phases.
fn phase_advance(traj: &Trajectory) -> Result<(f64, f64), CliError> {
    let mut a = Vec::with_capacity(traj.samples().len());
    let mut b = Vec::with_capacity(traj.samples().len());
    for s in traj.samples() {
        let (pa, pb) = extract_phases(&s.state, traj.params())?;
        a.push(pa);
        b.push(pb);
    }
    let (a, b) = (unwrap_phase(&a)?, unwrap_phase(&b)?);
    Ok((a[a.len() - 1] - a[0], b[b.len() - 1] - b[0]))
}

pub fn run_trajectory(config: &RunConfig) -> Result<Output, CliError> {
    let (start, traj) = synthesize(config, DEFAULT_PERIODS)?;
    let energies = traj.energies();
    let closed = frequencies(energies, &config.params);
    let measured = measure_periods(&traj)?;
    let (x_drift, q2_drift) = constant_drift(&traj)?;
    let (da, db) = phase_advance(&traj)?;
    let opposite = da * db < 0.0;
    let (h_drift, h_phi_drift) = traj.energy_drift();
    let omega_theta = 2.0 * std::f64::consts::PI / measured.period_theta;
    let omega_phi = 2.0 * std::f64::consts::PI / measured.period_phi;
    let summary = json!({
        "config": config,
        "initial_state": start,
        "steps": traj.samples().len() - 1,
        "period_theta": measured.period_theta,
        "period_phi": measured.period_phi,
        "ratio": measured.period_theta / measured.period_phi,
        "expected_ratio": config.params.shift_power() as f64 / config.params.n() as f64,
        "period_theta_closed_form": closed.period_theta,
        "omega_theta": omega_theta,
        "omega_phi": if opposite { -omega_phi } else { omega_phi },
        "sense": if opposite { "opposite" } else { "same" },
        "x_plus_drift": x_drift,
        "q2_plus_drift": q2_drift,
        "energy_drift": { "H": h_drift, "H_phi": h_phi_drift },
    });
    match config.format {
        Format::Json => {
            let mut value = summary;
            let rows: Vec<[f64; 5]> = traj
                .samples()
                .iter()
                .map(|s| [s.t, s.state.theta, s.state.phi, s.state.p_theta, s.state.p_phi])
                .collect();
            value["samples"] = json!(rows);
            Ok(Output::json(&value, true))
        }
        _ => {
            let mut csv = Vec::new();
            traj.write_csv(&mut csv)?;
            Ok(Output {
                document: String::from_utf8(csv).expect("CSV is ASCII"),
                summary: Some(pretty(&summary)),
                success: true,
            })
        }
    }
}

pub fn run_orbit(config: &RunConfig) -> Result<Output, CliError> {
    let energies = config.energies()?;
    let bounds = turning_points(&energies, &config.params)?;
    let orbit = orbit_from_phases(&energies, &config.params, config.phi0.unwrap_or(0.0), config.samples)?;
    match config.format {
        Format::Json => {
            let rows: Vec<[f64; 5]> = orbit.iter().map(|o| [o.t, o.theta, o.phi, o.p_theta, o.p_phi]).collect();
            let value = json!({ "config": config, "turning_points": bounds, "points": rows });
            Ok(Output::json(&value, true))
        }
        _ => {
            let mut csv = String::from("t,theta,phi,p_theta,p_phi\n");
            for o in &orbit {
                csv.push_str(&format!("{},{},{},{},{}\n", o.t, o.theta, o.phi, o.p_theta, o.p_phi));
            }
            Ok(Output {
                document: csv,
                summary: None,
                success: true,
            })
        }
    }
}

const GRID_LEVELS: u32 = 3;
const MAX_PLOT_POINTS: usize = 5000;

pub fn run_plot(config: &RunConfig) -> Result<Output, CliError> {
    let energies = config.energies()?;
    let bounds = turning_points(&energies, &config.params)?;
    let points: Vec<(f64, f64)> = match config.source {
        Source::Orbit => orbit_from_phases(&energies, &config.params, config.phi0.unwrap_or(0.0), config.samples)?
            .iter()
            .map(|o| (o.phi, o.theta))
            .collect(),
        Source::Trajectory => {
            // one full closed period spans n theta periods
            let (_, traj) = synthesize(config, config.params.n() as f64)?;
            let samples = traj.samples();
            let stride = samples.len().div_ceil(MAX_PLOT_POINTS).max(1);
            let mut pts: Vec<(f64, f64)> = samples.iter().step_by(stride).map(|s| (s.state.phi, s.state.theta)).collect();
            let last = samples[samples.len() - 1].state;
            if (samples.len() - 1) % stride != 0 {
                pts.push((last.phi, last.theta));
            }
            pts
        }
    };
    let document = svg::render(&points, &bounds, config.params.k(), config.true_coords)?;
    Ok(Output {
        document,
        summary: None,
        success: true,
    })
}
