//! Numeric verification of the bracket, factorization and conjugation
//! identities at random in-domain states.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ladder_b, ladder_d, m_value_at, q1_closed_form, shift_a, symmetry_x, BracketEngine, Sign};
use crate::error::{Error, Result};
use crate::model::{h_phi_raw, h_total_raw, CouplingParams, EnergyData, PhaseState, Variant};

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub identity_name: String,
    pub states_tested: usize,
    pub max_relative_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    pub states: usize,
    pub bracket_tolerance: f64,
    pub factorization_tolerance: f64,
    pub symmetry_product_tolerance: f64,
    /// Negative control: perturbs `B+` so that its identities must fail.
    #[serde(default)]
    pub corrupt_ladder_b: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 20140101,
            states: 100,
            bracket_tolerance: 1e-6,
            factorization_tolerance: 1e-10,
            symmetry_product_tolerance: 1e-8,
            corrupt_ladder_b: false,
        }
    }
}

/// Draws states away from the singular edges, inside the region where all
/// functions of the suite are smooth.
pub fn random_states(variant: Variant, count: usize, seed: u64) -> Vec<PhaseState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = match variant {
        Variant::TwoParameter => (0.15, FRAC_PI_2 - 0.15),
        Variant::OneParameter => (-FRAC_PI_2 + 0.15, FRAC_PI_2 - 0.15),
    };
    (0..count)
        .map(|_| {
            PhaseState::new(
                rng.random_range(0.25..PI - 0.25),
                rng.random_range(lo..hi),
                rng.random_range(-2.5..2.5),
                rng.random_range(-2.5..2.5),
            )
        })
        .collect()
}

struct Suite<'a> {
    params: &'a CouplingParams,
    opts: &'a VerifyOptions,
    states: Vec<PhaseState>,
    engine: BracketEngine,
}

type Cfn<'a> = Box<dyn Fn(&PhaseState) -> Result<Complex64> + 'a>;

impl<'a> Suite<'a> {
    fn new(params: &'a CouplingParams, opts: &'a VerifyOptions, seed: u64) -> Self {
        Suite {
            params,
            opts,
            states: random_states(params.variant(), opts.states, seed),
            engine: BracketEngine::new(params.variant()),
        }
    }

    fn b(&self, sign: Sign) -> Cfn<'a> {
        let params = self.params;
        let corrupt = self.opts.corrupt_ladder_b && sign == Sign::Plus;
        Box::new(move |s: &PhaseState| {
            let b = ladder_b(s, params, sign)?;
            Ok(if corrupt {
                b + Complex64::new(0.25 * s.phi.sin(), 0.1 * s.p_phi)
            } else {
                b
            })
        })
    }

    fn h_total(&self) -> Cfn<'a> {
        let params = self.params;
        Box::new(move |s: &PhaseState| {
            params.check_state(s)?;
            Ok(Complex64::from(h_total_raw(s, params)))
        })
    }

    fn h_phi(&self) -> Cfn<'a> {
        let params = self.params;
        Box::new(move |s: &PhaseState| {
            params.check_state(s)?;
            Ok(Complex64::from(h_phi_raw(s.phi, s.p_phi, params)))
        })
    }

    /// `{f, g_sign} = rhs(sign, state) * g_sign(state)` over both signs.
    fn bracket_identity<R>(
        &self,
        name: &str,
        f: Cfn<'a>,
        g: impl Fn(Sign) -> Cfn<'a>,
        rhs_factor: R,
    ) -> Result<IdentityRecord>
    where
        R: Fn(Sign, &PhaseState) -> Result<Complex64>,
    {
        let mut worst: f64 = 0.0;
        for state in &self.states {
            for sign in Sign::BOTH {
                let gs = g(sign);
                let terms = self.engine.bracket_terms(&f, &gs, state)?;
                let rhs = rhs_factor(sign, state)? * gs(state)?;
                let err = (terms.value - rhs).norm() / rhs.norm().max(terms.magnitude).max(f64::MIN_POSITIVE);
                worst = worst.max(err);
            }
        }
        Ok(self.record(name, worst, self.opts.bracket_tolerance))
    }

    fn pointwise<F>(&self, name: &str, tolerance: f64, check: F) -> Result<IdentityRecord>
    where
        F: Fn(&PhaseState) -> Result<f64>,
    {
        let mut worst: f64 = 0.0;
        for s in &self.states {
            worst = worst.max(check(s)?);
        }
        Ok(self.record(name, worst, tolerance))
    }

    fn record(&self, name: &str, worst: f64, tolerance: f64) -> IdentityRecord {
        IdentityRecord {
            identity_name: name.to_string(),
            states_tested: self.states.len(),
            max_relative_error: worst,
            pass: worst.is_finite() && worst < tolerance,
        }
    }
}

fn i_times(x: f64) -> Complex64 {
    Complex64::new(0.0, x)
}

fn variant_suite(params: &CouplingParams, opts: &VerifyOptions, seed: u64) -> Result<Vec<IdentityRecord>> {
    let suite = Suite::new(params, opts, seed);
    let p = params;
    let tag = match p.variant() {
        Variant::TwoParameter => "two-parameter",
        Variant::OneParameter => "one-parameter",
    };
    // {H_phi, B±} = ∓ c i √H_phi B±, c = 4 (two) or 2 (one)
    let c = match p.variant() {
        Variant::TwoParameter => 4.0,
        Variant::OneParameter => 2.0,
    };
    let k = p.k();
    let mut out = Vec::new();

    out.push(suite.bracket_identity(
        &format!("{{H_phi,B+-}} {tag}"),
        suite.h_phi(),
        |sign| suite.b(sign),
        |sign, s| Ok(i_times(-sign.value() * c * h_phi_raw(s.phi, s.p_phi, p).sqrt())),
    )?);

    out.push(suite.bracket_identity(
        &format!("{{H,B+-}} {tag}"),
        suite.h_total(),
        |sign| suite.b(sign),
        |sign, s| {
            let m = m_value_at(s, p)?;
            Ok(i_times(-sign.value() * c * m * k / s.theta.sin().powi(2)))
        },
    )?);

    out.push(suite.bracket_identity(
        &format!("{{H,X+-}} {tag}"),
        suite.h_total(),
        |sign| -> Cfn<'_> {
            let b = suite.b(sign);
            Box::new(move |s: &PhaseState| {
                let a = shift_a(s, m_value_at(s, p)?, sign)?;
                Ok(b(s)?.powu(p.n()) * a.powu(p.shift_power()))
            })
        },
        |_, _| Ok(Complex64::new(0.0, 0.0)),
    )?);

    match p.variant() {
        Variant::TwoParameter => {
            let d = p.beta().powi(2) - p.alpha().powi(2);
            let s2 = p.alpha().powi(2) + p.beta().powi(2);
            let bp = suite.b(Sign::Plus);
            let bm = suite.b(Sign::Minus);
            out.push(suite.pointwise(
                "B+B- = H_phi + (beta^2-alpha^2)^2/H_phi - 2(alpha^2+beta^2)",
                opts.factorization_tolerance,
                |s| {
                    let h = h_phi_raw(s.phi, s.p_phi, p);
                    let bb = bp(s)? * bm(s)?;
                    let rhs = h + d * d / h - 2.0 * s2;
                    Ok((bb - rhs).norm() / (h + d * d / h + 2.0 * s2))
                },
            )?);
        }
        Variant::OneParameter => {
            let bp = suite.b(Sign::Plus);
            let bm = suite.b(Sign::Minus);
            out.push(suite.pointwise(
                "H_phi = B+B- + alpha^2",
                opts.factorization_tolerance,
                |s| {
                    let h = h_phi_raw(s.phi, s.p_phi, p);
                    let bb = bp(s)? * bm(s)?;
                    Ok((bb + p.alpha().powi(2) - h).norm() / h)
                },
            )?);
        }
    }

    let bp = suite.b(Sign::Plus);
    let bm = suite.b(Sign::Minus);
    out.push(suite.pointwise(
        &format!("F- = conj(F+) for A, B, D, X {tag}"),
        opts.factorization_tolerance,
        |s| {
            let m = m_value_at(s, p)?;
            let pairs = [
                (bp(s)?, bm(s)?),
                (shift_a(s, m, Sign::Plus)?, shift_a(s, m, Sign::Minus)?),
                (ladder_d(s, m, Sign::Plus)?, ladder_d(s, m, Sign::Minus)?),
                (symmetry_x(s, p, Sign::Plus)?, symmetry_x(s, p, Sign::Minus)?),
            ];
            Ok(pairs
                .iter()
                .map(|(a, b)| (a.conj() - b).norm() / a.norm().max(1.0))
                .fold(0.0, f64::max))
        },
    )?);

    out.push(suite.pointwise(
        &format!("X+X- = q1(E_theta, E_phi)^2 {tag}"),
        opts.symmetry_product_tolerance,
        |s| {
            let prod = symmetry_x(s, p, Sign::Plus)? * symmetry_x(s, p, Sign::Minus)?;
            let energies = EnergyData::from_state(s, p);
            let expect = match energies {
                Ok(e) => q1_closed_form(&e, p).powi(2),
                // states outside the libration inequalities still obey the identity
                Err(_) => {
                    let h = h_phi_raw(s.phi, s.p_phi, p);
                    let m = k * h.sqrt();
                    p.ladder_modulus_sq(h).powi(p.n() as i32)
                        * (h_total_raw(s, p) - m * m).powi(p.shift_power() as i32)
                }
            };
            Ok((prod - expect).norm() / expect.abs().max(f64::MIN_POSITIVE))
        },
    )?);

    Ok(out)
}

fn theta_suite(params: &CouplingParams, opts: &VerifyOptions, seed: u64) -> Result<Vec<IdentityRecord>> {
    let suite = Suite::new(params, opts, seed);
    let p = params;
    let mut out = Vec::new();
    out.push(suite.bracket_identity(
        "{H_theta,A+-}",
        suite.h_total(),
        |sign| -> Cfn<'_> { Box::new(move |s: &PhaseState| shift_a(s, m_value_at(s, p)?, sign)) },
        |sign, s| {
            let m = m_value_at(s, p)?;
            Ok(i_times(sign.value() * 2.0 * m / s.theta.sin().powi(2)))
        },
    )?);
    out.push(suite.bracket_identity(
        "{H_theta,D+-}",
        suite.h_total(),
        |sign| -> Cfn<'_> { Box::new(move |s: &PhaseState| ladder_d(s, m_value_at(s, p)?, sign)) },
        |sign, s| Ok(i_times(-sign.value() * 2.0 * h_total_raw(s, p).sqrt())),
    )?);
    out.push(suite.pointwise("H_theta = A+A- + M^2", opts.factorization_tolerance, |s| {
        let m = m_value_at(s, p)?;
        let h = h_total_raw(s, p);
        let aa = shift_a(s, m, Sign::Plus)? * shift_a(s, m, Sign::Minus)?;
        Ok((aa + m * m - h).norm() / h)
    })?);
    out.push(suite.pointwise("D+D- = H_theta - M^2", opts.factorization_tolerance, |s| {
        let m = m_value_at(s, p)?;
        let h = h_total_raw(s, p);
        let dd = ladder_d(s, m, Sign::Plus)? * ladder_d(s, m, Sign::Minus)?;
        Ok((dd - (h - m * m)).norm() / h)
    })?);
    Ok(out)
}

/// Full report over a two-parameter and a one-parameter system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub records: Vec<IdentityRecord>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn find(&self, name: &str) -> Option<&IdentityRecord> {
        self.records.iter().find(|r| r.identity_name == name)
    }
}

/// Runs every identity. `two` must be a two-parameter system and `one` a
/// one-parameter system; the shift-function identities use `two`.
pub fn run_verification(
    two: &CouplingParams,
    one: &CouplingParams,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    if two.variant() != Variant::TwoParameter || one.variant() != Variant::OneParameter {
        return Err(Error::InvalidArgument(
            "verification needs one two-parameter and one one-parameter system".into(),
        ));
    }
    let mut records = variant_suite(two, opts, opts.seed)?;
    records.extend(variant_suite(one, opts, opts.seed.wrapping_add(1))?);
    records.extend(theta_suite(two, opts, opts.seed.wrapping_add(2))?);
    Ok(VerificationReport { records })
}
