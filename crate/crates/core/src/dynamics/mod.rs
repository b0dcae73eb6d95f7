//! Hamilton's equations, a fixed-step RK4 integrator used as an oracle, and
//! the trajectory container with its CSV form.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{h_phi_raw, h_total_raw, CouplingParams, EnergyData, PhaseState, Variant};

mod motion;

pub use motion::{
    frequencies, initial_state, invert_ladder_phase, measure_periods, orbit_from_phases, shift_phase,
    theta_motion, theta_turning_points, turning_points, Frequencies, MeasuredPeriods, OrbitPoint,
    TurningPoints,
};

/// Default RK4 step.
pub const DEFAULT_DT: f64 = 1e-4;
/// Relative drift of `H` and `H_phi` tolerated along a trajectory.
pub const DRIFT_GATE: f64 = 1e-7;

/// Right-hand side of Hamilton's equations, `(θ̇, φ̇, ṗ_θ, ṗ_φ)`.
pub fn hamilton_derivatives(state: &PhaseState, params: &CouplingParams) -> Result<[f64; 4]> {
    params.check_state(state)?;
    Ok(derivatives_raw(state, params))
}

fn derivatives_raw(state: &PhaseState, params: &CouplingParams) -> [f64; 4] {
    let k2 = params.k().powi(2);
    let (st, ct) = state.theta.sin_cos();
    let (sp, cp) = state.phi.sin_cos();
    let a2 = params.alpha().powi(2);
    let h_phi = h_phi_raw(state.phi, state.p_phi, params);
    let mut dv_dphi = 2.0 * a2 * sp / cp.powi(3);
    if params.variant() == Variant::TwoParameter {
        dv_dphi -= 2.0 * params.beta().powi(2) * cp / sp.powi(3);
    }
    [
        2.0 * state.p_theta,
        2.0 * k2 * state.p_phi / (st * st),
        2.0 * k2 * ct / st.powi(3) * h_phi,
        -k2 / (st * st) * dv_dphi,
    ]
}

fn rk4_step(state: &PhaseState, params: &CouplingParams, dt: f64) -> Result<PhaseState> {
    let y = state.to_array();
    let shifted = |k: &[f64; 4], c: f64| -> Result<PhaseState> {
        let mut v = y;
        for i in 0..4 {
            v[i] += c * k[i];
        }
        let s = PhaseState::from_array(v);
        params.check_state(&s)?;
        Ok(s)
    };
    let k1 = derivatives_raw(state, params);
    let k2 = derivatives_raw(&shifted(&k1, dt / 2.0)?, params);
    let k3 = derivatives_raw(&shifted(&k2, dt / 2.0)?, params);
    let k4 = derivatives_raw(&shifted(&k3, dt)?, params);
    let mut out = y;
    for i in 0..4 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    let s = PhaseState::from_array(out);
    params.check_state(&s)?;
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: PhaseState,
}

/// Time-ordered samples of one motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    samples: Vec<Sample>,
    params: CouplingParams,
    energies: EnergyData,
}

impl Trajectory {
    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn params(&self) -> &CouplingParams {
        &self.params
    }

    pub fn energies(&self) -> &EnergyData {
        &self.energies
    }

    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t) - self.samples.first().map_or(0.0, |s| s.t)
    }

    /// Largest relative deviation of `(H, H_phi)` from their initial values.
    pub fn energy_drift(&self) -> (f64, f64) {
        let e = &self.energies;
        self.samples.iter().fold((0.0f64, 0.0f64), |(dh, dp), s| {
            let h = h_total_raw(&s.state, &self.params);
            let hp = h_phi_raw(s.state.phi, s.state.p_phi, &self.params);
            (
                dh.max((h - e.e_theta()).abs() / e.e_theta()),
                dp.max((hp - e.e_phi()).abs() / e.e_phi()),
            )
        })
    }

    /// Writes `t,theta,phi,p_theta,p_phi,H,H_phi`, one row per sample, with
    /// shortest round-trip decimal formatting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,theta,phi,p_theta,p_phi,H,H_phi")?;
        for s in &self.samples {
            let st = &s.state;
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                s.t,
                st.theta,
                st.phi,
                st.p_theta,
                st.p_phi,
                h_total_raw(st, &self.params),
                h_phi_raw(st.phi, st.p_phi, &self.params)
            )?;
        }
        Ok(())
    }
}

/// Fixed-step RK4 from `t = 0`, recording every step, with the default
/// energy-drift gate.
pub fn integrate(start: &PhaseState, params: &CouplingParams, dt: f64, steps: usize) -> Result<Trajectory> {
    integrate_with_gate(start, params, dt, steps, DRIFT_GATE)
}

pub fn integrate_with_gate(
    start: &PhaseState,
    params: &CouplingParams,
    dt: f64,
    steps: usize,
    gate: f64,
) -> Result<Trajectory> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt = {dt} must be positive")));
    }
    params.check_state(start)?;
    let energies = EnergyData::from_state(start, params)?;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(Sample { t: 0.0, state: *start });
    let mut state = *start;
    for i in 1..=steps {
        state = rk4_step(&state, params, dt).map_err(|_| Error::LeftDomain(i))?;
        samples.push(Sample { t: i as f64 * dt, state });
    }
    let traj = Trajectory {
        samples,
        params: *params,
        energies,
    };
    let (dh, dp) = traj.energy_drift();
    let drift = dh.max(dp);
    if drift > gate {
        return Err(Error::EnergyDriftExceeded { drift, gate });
    }
    Ok(traj)
}
