//! Domain types for the Lissajous system on the sphere and evaluation of its
//! Hamiltonian functions.
//!
//! Units are fixed to `2m = 1`, `hbar = 1`. After the dilation of the
//! azimuthal angle the classical Hamiltonian reads
//!
//! ```text
//! H = p_theta^2 + k^2 / sin^2(theta) * H_phi
//! H_phi = p_phi^2 + alpha^2 / cos^2(phi) + beta^2 / sin^2(phi)
//! ```
//!
//! with the `beta` term absent for the one-parameter variant.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Margin used by the open-interval domain guards.
pub const DEFAULT_MARGIN: f64 = 1e-9;
/// Relative distance from a libration bound treated as an equilibrium.
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-12;

/// Which Pöschl–Teller potential drives the azimuthal motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(alias = "two")]
    TwoParameter,
    #[serde(alias = "one")]
    OneParameter,
}

impl Variant {
    /// Smallest admissible coupling for this variant.
    pub fn min_coupling(self) -> f64 {
        match self {
            Variant::TwoParameter => 0.25,
            Variant::OneParameter => 0.5,
        }
    }

    /// Open interval spanned by `phi`.
    pub fn phi_range(self) -> (f64, f64) {
        match self {
            Variant::TwoParameter => (0.0, FRAC_PI_2),
            Variant::OneParameter => (-FRAC_PI_2, FRAC_PI_2),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::TwoParameter => f.write_str("two"),
            Variant::OneParameter => f.write_str("one"),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "two" | "twoparameter" | "two-parameter" => Ok(Variant::TwoParameter),
            "one" | "oneparameter" | "one-parameter" => Ok(Variant::OneParameter),
            other => Err(Error::BadVariant(format!("unknown variant '{other}'"))),
        }
    }
}

/// Unvalidated parameter record, as read from JSON or the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    pub m: i64,
    pub n: i64,
    pub alpha: f64,
    pub beta: f64,
    pub variant: Variant,
}

/// Validated system parameters. The coupling `k = m/n` is kept as a reduced
/// integer pair; floating point is only used at evaluation sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct CouplingParams {
    m: u32,
    n: u32,
    alpha: f64,
    beta: f64,
    variant: Variant,
}

impl TryFrom<RawParams> for CouplingParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        validate_params(raw)
    }
}

impl From<CouplingParams> for RawParams {
    fn from(p: CouplingParams) -> Self {
        RawParams {
            m: p.m as i64,
            n: p.n as i64,
            alpha: p.alpha,
            beta: p.beta,
            variant: p.variant,
        }
    }
}

/// Checks a raw record and reduces `m/n` to lowest terms.
pub fn validate_params(raw: RawParams) -> Result<CouplingParams> {
    if raw.m <= 0 {
        return Err(Error::NonPositiveInteger { name: "m", value: raw.m });
    }
    if raw.n <= 0 {
        return Err(Error::NonPositiveInteger { name: "n", value: raw.n });
    }
    let g = raw.m.gcd(&raw.n);
    let (m, n) = (raw.m / g, raw.n / g);
    let (m, n) = match (u32::try_from(m), u32::try_from(n)) {
        (Ok(m), Ok(n)) => (m, n),
        _ => return Err(Error::InvalidArgument(format!("coupling {m}/{n} too large"))),
    };
    let min = raw.variant.min_coupling();
    if (m as f64) < min * n as f64 {
        return Err(Error::KTooSmall { m, n, min });
    }
    if !raw.alpha.is_finite() || !raw.beta.is_finite() || raw.alpha < 0.0 || raw.beta < 0.0 {
        return Err(Error::BadVariant(format!(
            "strengths must be finite and non-negative (alpha={}, beta={})",
            raw.alpha, raw.beta
        )));
    }
    match raw.variant {
        Variant::OneParameter if raw.beta != 0.0 => {
            return Err(Error::BadVariant(format!(
                "one-parameter potential requires beta = 0, got {}",
                raw.beta
            )))
        }
        Variant::TwoParameter if raw.alpha == 0.0 || raw.beta == 0.0 => {
            return Err(Error::BadVariant(
                "two-parameter potential requires alpha > 0 and beta > 0".into(),
            ))
        }
        _ => {}
    }
    Ok(CouplingParams {
        m,
        n,
        alpha: raw.alpha,
        beta: raw.beta,
        variant: raw.variant,
    })
}

impl CouplingParams {
    pub fn new(m: i64, n: i64, alpha: f64, beta: f64, variant: Variant) -> Result<Self> {
        validate_params(RawParams { m, n, alpha, beta, variant })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn k(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    /// Power of the shift function inside the symmetry `X = B^n A^p`:
    /// `2m` for the two-parameter potential and `m` for the one-parameter one.
    pub fn shift_power(&self) -> u32 {
        match self.variant {
            Variant::TwoParameter => 2 * self.m,
            Variant::OneParameter => self.m,
        }
    }

    /// `|B+|^2` as a function of the value of `H_phi`.
    pub fn ladder_modulus_sq(&self, e_phi: f64) -> f64 {
        let a2 = self.alpha * self.alpha;
        let b2 = self.beta * self.beta;
        match self.variant {
            Variant::TwoParameter => e_phi + (b2 - a2).powi(2) / e_phi - 2.0 * (b2 + a2),
            Variant::OneParameter => e_phi - a2,
        }
    }

    /// Checks the open-interval invariants of a phase point.
    pub fn check_state(&self, state: &PhaseState) -> Result<()> {
        state.check(self.variant, DEFAULT_MARGIN)
    }
}

impl fmt::Display for CouplingParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k={}/{} alpha={} beta={} variant={}",
            self.m, self.n, self.alpha, self.beta, self.variant
        )
    }
}

/// A classical phase-space point `(theta, phi, p_theta, p_phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseState {
    pub theta: f64,
    pub phi: f64,
    pub p_theta: f64,
    pub p_phi: f64,
}

impl PhaseState {
    pub fn new(theta: f64, phi: f64, p_theta: f64, p_phi: f64) -> Self {
        PhaseState { theta, phi, p_theta, p_phi }
    }

    /// Components in the order `(theta, phi, p_theta, p_phi)`.
    pub fn to_array(self) -> [f64; 4] {
        [self.theta, self.phi, self.p_theta, self.p_phi]
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        PhaseState::new(v[0], v[1], v[2], v[3])
    }

    /// Rejects points within `margin` of the singular boundaries.
    pub fn check(&self, variant: Variant, margin: f64) -> Result<()> {
        let finite = self.to_array().iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::DomainViolation(format!("non-finite state {self:?}")));
        }
        if self.theta.sin() <= margin || self.theta <= 0.0 || self.theta >= std::f64::consts::PI {
            return Err(Error::DomainViolation(format!("theta = {} not in (0, pi)", self.theta)));
        }
        let (lo, hi) = variant.phi_range();
        let inside = self.phi > lo && self.phi < hi && self.phi.cos() > margin;
        let inside = match variant {
            Variant::TwoParameter => inside && self.phi.sin() > margin,
            Variant::OneParameter => inside,
        };
        if !inside {
            return Err(Error::DomainViolation(format!(
                "phi = {} not in ({lo}, {hi})",
                self.phi
            )));
        }
        Ok(())
    }
}

/// Values of the conserved quantities `E_theta = H`, `E_phi = H_phi` and
/// `M = k sqrt(E_phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyData {
    e_theta: f64,
    e_phi: f64,
    m_value: f64,
}

impl EnergyData {
    /// Validates `(E_theta, E_phi)` against the libration inequalities
    /// `|B+|^2 > 0` and `E_theta > k^2 E_phi`.
    pub fn new(e_theta: f64, e_phi: f64, params: &CouplingParams) -> Result<Self> {
        if !(e_phi.is_finite() && e_theta.is_finite()) || e_phi <= 0.0 {
            return Err(Error::InvalidEnergies(format!("E_phi = {e_phi} must be positive")));
        }
        let k = params.k();
        let floor = k * k * e_phi;
        let modulus = params.ladder_modulus_sq(e_phi);
        // energies sitting exactly on a bound are equilibria, not errors of input
        if (e_theta - floor).abs() <= EQUILIBRIUM_TOLERANCE * floor {
            return Err(Error::NoLibration(format!("E_theta = k^2 E_phi = {floor}: theta rests on the equator")));
        }
        if modulus.abs() <= EQUILIBRIUM_TOLERANCE * e_phi {
            return Err(Error::NoLibration(format!("E_phi = {e_phi} is the bottom of the phi well")));
        }
        if e_theta < floor {
            return Err(Error::InvalidEnergies(format!("E_theta = {e_theta} must exceed k^2 E_phi = {floor}")));
        }
        if modulus < 0.0 {
            return Err(Error::InvalidEnergies(format!(
                "E_phi = {e_phi} lies below the phi well (|B|^2 = {modulus})"
            )));
        }
        Ok(EnergyData {
            e_theta,
            e_phi,
            m_value: k * e_phi.sqrt(),
        })
    }

    /// Energies carried by a phase point.
    pub fn from_state(state: &PhaseState, params: &CouplingParams) -> Result<Self> {
        let e_phi = eval_h_phi(state, params)?;
        let e_theta = eval_h_total(state, params)?;
        EnergyData::new(e_theta, e_phi, params)
    }

    pub fn e_theta(&self) -> f64 {
        self.e_theta
    }

    pub fn e_phi(&self) -> f64 {
        self.e_phi
    }

    pub fn m_value(&self) -> f64 {
        self.m_value
    }

    /// `q2 = sqrt(E_theta - M^2)`, the modulus of the shift functions.
    pub fn q2(&self) -> f64 {
        (self.e_theta - self.m_value * self.m_value).sqrt()
    }
}

pub(crate) fn h_phi_raw(phi: f64, p_phi: f64, params: &CouplingParams) -> f64 {
    let c = phi.cos();
    let mut h = p_phi * p_phi + params.alpha * params.alpha / (c * c);
    if params.variant == Variant::TwoParameter {
        let s = phi.sin();
        h += params.beta * params.beta / (s * s);
    }
    h
}

pub(crate) fn h_theta_raw(theta: f64, p_theta: f64, m_value: f64) -> f64 {
    let s = theta.sin();
    p_theta * p_theta + m_value * m_value / (s * s)
}

pub(crate) fn h_total_raw(state: &PhaseState, params: &CouplingParams) -> f64 {
    let k = params.k();
    let s = state.theta.sin();
    state.p_theta * state.p_theta + k * k / (s * s) * h_phi_raw(state.phi, state.p_phi, params)
}

/// `H_phi` at a phase point.
pub fn eval_h_phi(state: &PhaseState, params: &CouplingParams) -> Result<f64> {
    params.check_state(state)?;
    Ok(h_phi_raw(state.phi, state.p_phi, params))
}

/// `H_theta^M = p_theta^2 + M^2 / sin^2(theta)`.
pub fn eval_h_theta(state: &PhaseState, m_value: f64) -> Result<f64> {
    if m_value.is_nan() || m_value <= 0.0 {
        return Err(Error::InvalidArgument(format!("M = {m_value} must be positive")));
    }
    if !(state.theta > 0.0 && state.theta < std::f64::consts::PI && state.theta.sin() > DEFAULT_MARGIN)
    {
        return Err(Error::DomainViolation(format!("theta = {} not in (0, pi)", state.theta)));
    }
    Ok(h_theta_raw(state.theta, state.p_theta, m_value))
}

/// Total Hamiltonian `H`.
pub fn eval_h_total(state: &PhaseState, params: &CouplingParams) -> Result<f64> {
    params.check_state(state)?;
    Ok(h_total_raw(state, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

    fn two(m: i64, n: i64, a: f64, b: f64) -> CouplingParams {
        CouplingParams::new(m, n, a, b, Variant::TwoParameter).unwrap()
    }

    #[test]
    fn validate_examples() {
        let p = two(3, 1, 1.0, 1.0);
        assert_eq!((p.m(), p.n()), (3, 1));
        assert_eq!(p.k(), 3.0);

        let p = two(2, 4, 1.0, 1.0);
        assert_eq!((p.m(), p.n()), (1, 2));
        assert_eq!(p.k(), 0.5);

        let e = CouplingParams::new(1, 5, 1.0, 1.0, Variant::TwoParameter).unwrap_err();
        assert!(matches!(e, Error::KTooSmall { .. }));
    }

    #[test]
    fn validate_errors() {
        assert!(matches!(
            CouplingParams::new(0, 1, 1.0, 1.0, Variant::TwoParameter),
            Err(Error::NonPositiveInteger { name: "m", .. })
        ));
        assert!(matches!(
            CouplingParams::new(1, -2, 1.0, 1.0, Variant::TwoParameter),
            Err(Error::NonPositiveInteger { name: "n", .. })
        ));
        assert!(matches!(
            CouplingParams::new(1, 1, 1.0, 0.5, Variant::OneParameter),
            Err(Error::BadVariant(_))
        ));
        assert!(matches!(
            CouplingParams::new(1, 1, 1.0, 0.0, Variant::TwoParameter),
            Err(Error::BadVariant(_))
        ));
        // one-parameter systems need k >= 1/2
        assert!(matches!(
            CouplingParams::new(1, 3, 1.0, 0.0, Variant::OneParameter),
            Err(Error::KTooSmall { .. })
        ));
        assert!(CouplingParams::new(1, 3, 1.0, 1.0, Variant::TwoParameter).is_ok());
    }

    #[test]
    fn params_json_round_trip() {
        let p = two(6, 4, 1.0, 0.5);
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"m\":3") && json.contains("\"n\":2"));
        let back: CouplingParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"m":1,"n":5,"alpha":1.0,"beta":1.0,"variant":"two"}"#;
        assert!(serde_json::from_str::<CouplingParams>(bad).is_err());
    }

    #[test]
    fn h_phi_examples() {
        let p = two(1, 1, 1.0, 1.0);
        let s = PhaseState::new(FRAC_PI_2, FRAC_PI_4, 0.0, 0.0);
        assert_relative_eq!(eval_h_phi(&s, &p).unwrap(), 4.0, epsilon = 1e-12);
        let s = PhaseState::new(FRAC_PI_2, FRAC_PI_4, 0.0, 2.0);
        assert_relative_eq!(eval_h_phi(&s, &p).unwrap(), 8.0, epsilon = 1e-12);
        let one = CouplingParams::new(1, 1, 1.0, 0.0, Variant::OneParameter).unwrap();
        let s = PhaseState::new(FRAC_PI_2, FRAC_PI_3, 0.0, 0.0);
        assert_relative_eq!(eval_h_phi(&s, &one).unwrap(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn h_theta_examples() {
        let s = PhaseState::new(FRAC_PI_2, 0.3, 0.0, 0.0);
        assert_relative_eq!(eval_h_theta(&s, 2.0).unwrap(), 4.0, epsilon = 1e-12);
        let s = PhaseState::new(FRAC_PI_6, 0.3, 0.0, 0.0);
        assert_relative_eq!(eval_h_theta(&s, 1.0).unwrap(), 4.0, epsilon = 1e-12);
        let s = PhaseState::new(FRAC_PI_2, 0.3, 3.0, 0.0);
        assert_relative_eq!(eval_h_theta(&s, 0.5).unwrap(), 9.25, epsilon = 1e-12);
        assert!(eval_h_theta(&s, 0.0).is_err());
    }

    #[test]
    fn h_total_examples() {
        let p = two(1, 1, 1.0, 1.0);
        let s = PhaseState::new(FRAC_PI_2, FRAC_PI_4, 0.0, 0.0);
        assert_relative_eq!(eval_h_total(&s, &p).unwrap(), 4.0, epsilon = 1e-12);
        let s = PhaseState::new(FRAC_PI_6, FRAC_PI_4, 0.0, 0.0);
        assert_relative_eq!(eval_h_total(&s, &p).unwrap(), 16.0, epsilon = 1e-12);
    }

    #[test]
    fn domain_guards() {
        let p = two(1, 1, 1.0, 1.0);
        for s in [
            PhaseState::new(0.0, 0.5, 0.0, 0.0),
            PhaseState::new(PI, 0.5, 0.0, 0.0),
            PhaseState::new(1.0, 0.0, 0.0, 0.0),
            PhaseState::new(1.0, FRAC_PI_2, 0.0, 0.0),
            PhaseState::new(1.0, -0.2, 0.0, 0.0),
            PhaseState::new(1.0, 0.5, f64::NAN, 0.0),
        ] {
            assert!(matches!(eval_h_total(&s, &p), Err(Error::DomainViolation(_))), "{s:?}");
        }
        let one = CouplingParams::new(1, 1, 1.0, 0.0, Variant::OneParameter).unwrap();
        assert!(eval_h_phi(&PhaseState::new(1.0, -0.2, 0.0, 0.0), &one).is_ok());
        assert!(eval_h_phi(&PhaseState::new(1.0, -FRAC_PI_2, 0.0, 0.0), &one).is_err());
    }

    #[test]
    fn energy_inequalities() {
        let p = two(1, 1, 1.0, 1.0);
        assert!(EnergyData::new(16.0, 8.0, &p).is_ok());
        // E_theta must exceed k^2 E_phi
        assert!(matches!(EnergyData::new(8.0, 8.0, &p), Err(Error::NoLibration(_))));
        assert!(matches!(EnergyData::new(7.0, 8.0, &p), Err(Error::InvalidEnergies(_))));
        // E_phi = (alpha + beta)^2 is the bottom of the well: |B|^2 = 0
        assert!(matches!(EnergyData::new(16.0, 4.0, &p), Err(Error::NoLibration(_))));
        assert!(matches!(EnergyData::new(16.0, 3.0, &p), Err(Error::InvalidEnergies(_))));
        let e = EnergyData::new(16.0, 8.0, &p).unwrap();
        assert_eq!(e.m_value(), 8f64.sqrt());
    }

    #[test]
    fn h_phi_minimum_matches_stationarity() {
        let p = two(1, 1, 1.3, 0.7);
        let (a2, b2) = (p.alpha().powi(2), p.beta().powi(2));
        // alpha^2 sin^4 = beta^2 cos^4  =>  tan^2 phi = beta / alpha
        let analytic = (p.beta() / p.alpha()).sqrt().atan();
        let h = |phi: f64| h_phi_raw(phi, 0.0, &p);
        let (mut lo, mut hi) = (1e-3, FRAC_PI_2 - 1e-3);
        let n = 2000;
        let mut best = lo;
        for i in 0..=n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            if h(x) < h(best) {
                best = x;
            }
        }
        let step = (hi - lo) / n as f64;
        lo = best - step;
        hi = best + step;
        // golden-section refinement of the grid minimizer
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let x1 = hi - g * (hi - lo);
            let x2 = lo + g * (hi - lo);
            if h(x1) < h(x2) {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        let numeric = 0.5 * (lo + hi);
        assert!((numeric - analytic).abs() < 1e-8);
        let lhs = a2 * numeric.sin().powi(4);
        let rhs = b2 * numeric.cos().powi(4);
        assert!((lhs - rhs).abs() < 1e-8);
    }
}
