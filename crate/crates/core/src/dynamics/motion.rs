//! Closed-form motion and orbits obtained from the constants of motion.
//!
//! Phase anchoring: a motion built from `(E_theta, E_phi, phi0)` starts at
//! the lower theta turning point (`p_theta = 0`, so `a = arg A+ = 0`) with
//! the ladder phase `b = phi0 / n`. `phi0 = arg X+` then holds exactly.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{Error, Result};
use crate::model::{CouplingParams, EnergyData, PhaseState, Variant};

/// Bounds of the spherical rectangle that contains an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoints {
    pub theta1: f64,
    pub theta2: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl TurningPoints {
    pub fn contains(&self, theta: f64, phi: f64, margin: f64) -> bool {
        theta >= self.theta1 - margin
            && theta <= self.theta2 + margin
            && phi >= self.phi1 - margin
            && phi <= self.phi2 + margin
    }
}

/// Roots of `E_theta = M^2 / sin^2(theta)`. `E_theta = M^2` gives the
/// degenerate equator `theta1 = theta2 = pi/2`.
pub fn theta_turning_points(e_theta: f64, m_value: f64) -> Result<(f64, f64)> {
    if e_theta.is_nan() || e_theta <= 0.0 || m_value * m_value > e_theta * (1.0 + 1e-12) {
        return Err(Error::NoLibration(format!("E_theta = {e_theta} below M^2 = {}", m_value * m_value)));
    }
    let theta1 = (m_value / e_theta.sqrt()).min(1.0).asin();
    Ok((theta1, PI - theta1))
}

pub fn turning_points(energies: &EnergyData, params: &CouplingParams) -> Result<TurningPoints> {
    let (theta1, theta2) = theta_turning_points(energies.e_theta(), energies.m_value())?;
    let e = energies.e_phi();
    let a2 = params.alpha().powi(2);
    let (phi1, phi2) = match params.variant() {
        Variant::TwoParameter => {
            // E s^2 - (E + beta^2 - alpha^2) s + beta^2 = 0 with s = sin^2(phi)
            let b2 = params.beta().powi(2);
            let lin = e + b2 - a2;
            let disc = lin * lin - 4.0 * e * b2;
            if disc < 0.0 {
                return Err(Error::NoLibration(format!("negative discriminant {disc}")));
            }
            let root = disc.sqrt();
            let s_lo = (lin - root) / (2.0 * e);
            let s_hi = (lin + root) / (2.0 * e);
            if !(s_lo > 0.0 && s_hi < 1.0) {
                return Err(Error::NoLibration(format!("roots {s_lo}, {s_hi} outside (0, 1)")));
            }
            (s_lo.sqrt().asin(), s_hi.sqrt().asin())
        }
        Variant::OneParameter => {
            let ratio = params.alpha() / e.sqrt();
            if ratio > 1.0 {
                return Err(Error::NoLibration(format!("E_phi = {e} below alpha^2 = {a2}")));
            }
            let phi2 = ratio.acos();
            (-phi2, phi2)
        }
    };
    Ok(TurningPoints { theta1, theta2, phi1, phi2 })
}

/// `theta(t) = arccos[(q2/√E) cos(2√E t + θ0)]` with the matching `p_theta(t)`.
pub fn theta_motion(t: f64, energies: &EnergyData, theta0: f64) -> (f64, f64) {
    let root = energies.e_theta().sqrt();
    let q2 = energies.q2();
    let x = 2.0 * root * t + theta0;
    let (sx, cx) = x.sin_cos();
    let cos_theta = (q2 / root * cx).clamp(-1.0, 1.0);
    let theta = cos_theta.acos();
    let p_theta = q2 * sx / (1.0 - cos_theta * cos_theta).sqrt();
    (theta, p_theta)
}

/// Continuous shift phase `a(t)` along the closed-form theta motion. It
/// agrees with `arg A+` modulo 2π and decreases by 2π per theta period.
pub fn shift_phase(t: f64, energies: &EnergyData, theta0: f64) -> f64 {
    let root = energies.e_theta().sqrt();
    let x = 2.0 * root * t + theta0;
    // tan(-a) = r tan(x), r = √E / M; the correction term stays on one branch
    let r = root / energies.m_value();
    let (sx, cx) = x.sin_cos();
    -(x + ((r - 1.0) * sx * cx / (cx * cx + r * sx * sx)).atan())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequencies {
    pub omega_theta: f64,
    /// Negative: the two phases turn in opposite senses.
    pub omega_phi: f64,
    pub period_theta: f64,
}

pub fn frequencies(energies: &EnergyData, params: &CouplingParams) -> Frequencies {
    let root = energies.e_theta().sqrt();
    let omega_theta = 2.0 * root;
    let ratio = params.shift_power() as f64 / params.n() as f64;
    Frequencies {
        omega_theta,
        omega_phi: -ratio * omega_theta,
        period_theta: PI / root,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredPeriods {
    pub period_theta: f64,
    pub period_phi: f64,
    pub theta_crossings: usize,
    pub phi_crossings: usize,
}

fn upward_crossings(traj: &Trajectory, momentum: impl Fn(&PhaseState) -> f64) -> Vec<f64> {
    traj.samples()
        .windows(2)
        .filter_map(|w| {
            let (v0, v1) = (momentum(&w[0].state), momentum(&w[1].state));
            (v0 < 0.0 && v1 >= 0.0).then(|| w[0].t + (w[1].t - w[0].t) * (-v0) / (v1 - v0))
        })
        .collect()
}

/// Periods from upward zero crossings of `p_theta` and `p_phi`.
///
/// The phi crossings are not evenly spaced in time, but their pattern
/// repeats every `p` crossings (`p` the shift power of the symmetry), so
/// the phi period is averaged over whole multiples of that block when the
/// trajectory is long enough.
pub fn measure_periods(traj: &Trajectory) -> Result<MeasuredPeriods> {
    let theta = upward_crossings(traj, |s| s.p_theta);
    if theta.is_empty() {
        return Err(Error::NoOscillation("p_theta"));
    }
    if theta.len() < 3 {
        return Err(Error::TooShort(format!("{} theta crossings, need 3", theta.len())));
    }
    let phi = upward_crossings(traj, |s| s.p_phi);
    if phi.is_empty() {
        return Err(Error::NoOscillation("p_phi"));
    }
    if phi.len() < 2 {
        return Err(Error::TooShort("a single phi crossing".into()));
    }
    let period_theta = (theta[theta.len() - 1] - theta[0]) / (theta.len() - 1) as f64;
    let block = traj.params().shift_power() as usize;
    let intervals = phi.len() - 1;
    let used = if intervals >= block { intervals / block * block } else { intervals };
    let period_phi = (phi[used] - phi[0]) / used as f64;
    Ok(MeasuredPeriods {
        period_theta,
        period_phi,
        theta_crossings: theta.len(),
        phi_crossings: phi.len(),
    })
}

/// Solves `B+ = |B| e^{ib}` at energy `E_phi` for `(phi, p_phi)`.
pub fn invert_ladder_phase(b: f64, energies: &EnergyData, params: &CouplingParams) -> Result<(f64, f64)> {
    const SLACK: f64 = 1e-9;
    let e = energies.e_phi();
    let root = e.sqrt();
    let modulus = params.ladder_modulus_sq(e).max(0.0).sqrt();
    let (sb, cb) = b.sin_cos();
    match params.variant() {
        Variant::TwoParameter => {
            let d = params.beta().powi(2) - params.alpha().powi(2);
            let cos2 = (modulus * cb - d / root) / root;
            if cos2.abs() > 1.0 + SLACK {
                return Err(Error::InversionOutOfRange(cos2));
            }
            let phi = 0.5 * cos2.clamp(-1.0, 1.0).acos();
            let sin2 = (2.0 * phi).sin();
            if sin2 < 1e-12 {
                return Err(Error::DomainViolation(format!("phi = {phi} on the boundary")));
            }
            Ok((phi, modulus * sb / sin2))
        }
        Variant::OneParameter => {
            let sin = modulus * cb / root;
            if sin.abs() > 1.0 + SLACK {
                return Err(Error::InversionOutOfRange(sin));
            }
            let phi = sin.clamp(-1.0, 1.0).asin();
            let cos = phi.cos();
            if cos < 1e-12 {
                return Err(Error::DomainViolation(format!("phi = {phi} on the boundary")));
            }
            Ok((phi, -modulus * sb / cos))
        }
    }
}

/// Phase point with the given constants, anchored at the lower theta
/// turning point.
pub fn initial_state(energies: &EnergyData, params: &CouplingParams, phi0: f64) -> Result<PhaseState> {
    let (theta1, _) = theta_turning_points(energies.e_theta(), energies.m_value())?;
    let (phi, p_phi) = invert_ladder_phase(phi0 / params.n() as f64, energies, params)?;
    let state = PhaseState::new(theta1, phi, 0.0, p_phi);
    params.check_state(&state)?;
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitPoint {
    pub t: f64,
    pub theta: f64,
    pub phi: f64,
    pub p_theta: f64,
    pub p_phi: f64,
}

/// Orbit traced by the phase relation `p a + n b = phi0` over `n` theta
/// periods, sampled uniformly in time (so densest near turning points in
/// angle space). Starts at [`initial_state`] and returns to it.
pub fn orbit_from_phases(
    energies: &EnergyData,
    params: &CouplingParams,
    phi0: f64,
    samples: usize,
) -> Result<Vec<OrbitPoint>> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {samples}")));
    }
    let n = params.n() as f64;
    let power = params.shift_power() as f64;
    let span = n * frequencies(energies, params).period_theta;
    (0..samples)
        .map(|i| {
            let t = span * i as f64 / (samples - 1) as f64;
            let (theta, p_theta) = theta_motion(t, energies, 0.0);
            let a = shift_phase(t, energies, 0.0);
            let b = (phi0 - power * a) / n;
            let (phi, p_phi) = invert_ladder_phase(b, energies, params)?;
            Ok(OrbitPoint { t, theta, phi, p_theta, p_phi })
        })
        .collect()
}
