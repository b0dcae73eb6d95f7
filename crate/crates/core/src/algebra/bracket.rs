//! Numeric Poisson brackets on the four-dimensional phase space.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{CouplingParams, PhaseState, Variant, DEFAULT_MARGIN};

const COORDINATES: [&str; 4] = ["theta", "phi", "p_theta", "p_phi"];

/// Value of `{f, g}` together with the sum of the absolute values of its
/// individual products, used as the scale of relative errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketTerms {
    pub value: Complex64,
    pub magnitude: f64,
}

/// Finite-difference Poisson bracket with the convention `{q, p_q} = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketEngine {
    pub step: f64,
    pub variant: Variant,
    pub margin: f64,
}

impl BracketEngine {
    pub fn new(variant: Variant) -> Self {
        BracketEngine {
            step: 1e-6,
            variant,
            margin: DEFAULT_MARGIN,
        }
    }

    fn inside(&self, v: [f64; 4]) -> bool {
        PhaseState::from_array(v).check(self.variant, self.margin).is_ok()
    }

    /// Gradient in the order `(theta, phi, p_theta, p_phi)`. Central
    /// differences, falling back to second-order one-sided stencils when a
    /// central point leaves the domain.
    pub fn gradient<F>(&self, f: &F, state: &PhaseState) -> Result<[Complex64; 4]>
    where
        F: Fn(&PhaseState) -> Result<Complex64>,
    {
        let base = state.to_array();
        let h = self.step;
        let at = |i: usize, offset: f64| {
            let mut v = base;
            v[i] += offset;
            v
        };
        let eval = |v: [f64; 4]| f(&PhaseState::from_array(v));
        let mut grad = [Complex64::new(0.0, 0.0); 4];
        for (i, g) in grad.iter_mut().enumerate() {
            let (plus, minus) = (at(i, h), at(i, -h));
            *g = if self.inside(plus) && self.inside(minus) {
                (eval(plus)? - eval(minus)?) / (2.0 * h)
            } else if self.inside(at(i, 2.0 * h)) && self.inside(base) {
                (-3.0 * eval(base)? + 4.0 * eval(plus)? - eval(at(i, 2.0 * h))?) / (2.0 * h)
            } else if self.inside(at(i, -2.0 * h)) && self.inside(base) {
                (3.0 * eval(base)? - 4.0 * eval(minus)? + eval(at(i, -2.0 * h))?) / (2.0 * h)
            } else {
                return Err(Error::NearSingular(COORDINATES[i]));
            };
        }
        Ok(grad)
    }

    pub fn bracket_terms<F, G>(&self, f: F, g: G, state: &PhaseState) -> Result<BracketTerms>
    where
        F: Fn(&PhaseState) -> Result<Complex64>,
        G: Fn(&PhaseState) -> Result<Complex64>,
    {
        let df = self.gradient(&f, state)?;
        let dg = self.gradient(&g, state)?;
        let mut value = Complex64::new(0.0, 0.0);
        let mut magnitude = 0.0;
        for q in 0..2 {
            let p = q + 2;
            let first = df[q] * dg[p];
            let second = df[p] * dg[q];
            value += first - second;
            magnitude += first.norm() + second.norm();
        }
        Ok(BracketTerms { value, magnitude })
    }

    pub fn bracket<F, G>(&self, f: F, g: G, state: &PhaseState) -> Result<Complex64>
    where
        F: Fn(&PhaseState) -> Result<Complex64>,
        G: Fn(&PhaseState) -> Result<Complex64>,
    {
        Ok(self.bracket_terms(f, g, state)?.value)
    }
}

/// `{f, g}` at `state` with the default step `h = 1e-6`.
pub fn poisson_bracket<F, G>(f: F, g: G, state: &PhaseState, params: &CouplingParams) -> Result<Complex64>
where
    F: Fn(&PhaseState) -> Result<Complex64>,
    G: Fn(&PhaseState) -> Result<Complex64>,
{
    BracketEngine::new(params.variant()).bracket(f, g, state)
}
