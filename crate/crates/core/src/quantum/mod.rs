//! Quantum levels, degeneracy classes generated by the symmetry index maps,
//! and grid checks of the ladder and shift operators.
//!
//! A level is labelled by `(mu, nu)`: `nu` counts the phi excitation and
//! fixes `eps`, `mu` counts the theta excitation on top of `M = k eps`.
//! The energy depends on the labels only through `s = k eps + mu`, as
//! `E = s (s + 1)`.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{CouplingParams, Variant};

mod grid;
mod tridiag;

pub use grid::{
    grid_eigensolve, ladder_action_check, shift_factorization_residual, GridOperator, GridOperatorCheck,
    GridPotential, GridSpectrum, DEFAULT_EIGEN_COUNT, MIN_GRID_SIZE,
};
pub use tridiag::SymTridiagonal;

/// Tolerance on `s` for float grouping and for the strict bound `M^2 < E`.
pub const GROUPING_TOLERANCE: f64 = 1e-9;
/// Default cap on the number of enumerated levels.
pub const DEFAULT_LEVEL_LIMIT: usize = 2_000_000;

const MAX_DENOMINATOR: i64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumLevel {
    pub mu: u32,
    pub nu: u32,
    pub epsilon: f64,
    pub m_value: f64,
    pub energy: f64,
}

impl QuantumLevel {
    pub fn s(&self) -> f64 {
        self.m_value + self.mu as f64
    }
}

/// Phi ladder index. The one-parameter ladder moves `eps` in unit steps
/// from `alpha + 1/2`.
pub fn epsilon_of(nu: u32, params: &CouplingParams) -> f64 {
    match params.variant() {
        Variant::TwoParameter => params.alpha() + params.beta() + 2.0 * nu as f64 + 1.0,
        Variant::OneParameter => params.alpha() + nu as f64 + 0.5,
    }
}

pub fn energy_level(mu: u32, nu: u32, params: &CouplingParams) -> QuantumLevel {
    let epsilon = epsilon_of(nu, params);
    let m_value = params.k() * epsilon;
    let s = m_value + mu as f64;
    QuantumLevel {
        mu,
        nu,
        epsilon,
        m_value,
        energy: s * (s + 1.0),
    }
}

/// Exact value of `x` as a fraction with denominator at most 1000, if any.
fn as_fraction(x: f64) -> Option<Ratio<i64>> {
    (1..=MAX_DENOMINATOR).find_map(|d| {
        let num = (x * d as f64).round();
        (num.abs() < 1e12 && num / d as f64 == x).then(|| Ratio::new(num as i64, d))
    })
}

/// Exact `s` for every label when the couplings are rational.
struct ExactScale {
    k: Ratio<i64>,
    base: Ratio<i64>,
    step: Ratio<i64>,
}

impl ExactScale {
    fn new(params: &CouplingParams) -> Option<Self> {
        let alpha = as_fraction(params.alpha())?;
        let (base, step) = match params.variant() {
            Variant::TwoParameter => (alpha + as_fraction(params.beta())? + 1, Ratio::from_integer(2)),
            Variant::OneParameter => (alpha + Ratio::new(1, 2), Ratio::from_integer(1)),
        };
        Some(ExactScale {
            k: Ratio::new(params.m() as i64, params.n() as i64),
            base,
            step,
        })
    }

    fn s(&self, mu: u32, nu: u32) -> Ratio<i64> {
        self.k * (self.base + self.step * nu as i64) + mu as i64
    }
}

/// Levels sharing one energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyClass {
    pub s: f64,
    pub energy: f64,
    pub levels: Vec<QuantumLevel>,
}

impl EnergyClass {
    pub fn multiplicity(&self) -> usize {
        self.levels.len()
    }

    pub fn contains(&self, mu: u32, nu: u32) -> bool {
        self.levels.iter().any(|l| l.mu == mu && l.nu == nu)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub params: CouplingParams,
    pub max_s: f64,
    /// Whether classes were formed with exact rational arithmetic.
    pub exact: bool,
    pub classes: Vec<EnergyClass>,
}

impl SpectrumTable {
    pub fn multiplicities(&self) -> Vec<usize> {
        self.classes.iter().map(EnergyClass::multiplicity).collect()
    }

    pub fn class_of(&self, mu: u32, nu: u32) -> Option<&EnergyClass> {
        self.classes.iter().find(|c| c.contains(mu, nu))
    }

    pub fn level_count(&self) -> usize {
        self.classes.iter().map(EnergyClass::multiplicity).sum()
    }

    /// `{"params": .., "classes": [{"s", "energy", "levels": [[mu, nu], ..]}]}`
    pub fn to_json(&self) -> Value {
        let classes: Vec<Value> = self
            .classes
            .iter()
            .map(|c| {
                let levels: Vec<[u32; 2]> = c.levels.iter().map(|l| [l.mu, l.nu]).collect();
                json!({ "s": c.s, "energy": c.energy, "levels": levels })
            })
            .collect();
        json!({ "params": self.params, "classes": classes })
    }
}

pub fn enumerate_spectrum(params: &CouplingParams, max_s: f64) -> Result<SpectrumTable> {
    enumerate_spectrum_with_limit(params, max_s, DEFAULT_LEVEL_LIMIT)
}

/// All labels with `k eps + mu <= max_s`, grouped by `s`.
pub fn enumerate_spectrum_with_limit(params: &CouplingParams, max_s: f64, limit: usize) -> Result<SpectrumTable> {
    if max_s <= 0.0 || !max_s.is_finite() {
        return Err(Error::InvalidArgument(format!("max_s = {max_s} must be positive")));
    }
    let mut levels = Vec::new();
    let mut nu = 0u32;
    loop {
        let first = energy_level(0, nu, params);
        if first.s() > max_s + GROUPING_TOLERANCE {
            break;
        }
        let mut mu = 0u32;
        loop {
            let level = energy_level(mu, nu, params);
            if level.s() > max_s + GROUPING_TOLERANCE {
                break;
            }
            if levels.len() >= limit {
                return Err(Error::CutoffTooLarge { limit });
            }
            levels.push(level);
            mu += 1;
        }
        nu += 1;
    }

    let exact = ExactScale::new(params);
    let mut classes: Vec<EnergyClass> = Vec::new();
    match &exact {
        Some(scale) => {
            let mut keyed: Vec<(Ratio<i64>, QuantumLevel)> =
                levels.into_iter().map(|l| (scale.s(l.mu, l.nu), l)).collect();
            keyed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.nu.cmp(&b.1.nu)));
            let mut current: Option<Ratio<i64>> = None;
            for (key, level) in keyed {
                if current != Some(key) {
                    classes.push(new_class(&level));
                    current = Some(key);
                }
                classes.last_mut().expect("class pushed").levels.push(level);
            }
        }
        None => {
            levels.sort_by(|a, b| a.s().total_cmp(&b.s()).then(a.nu.cmp(&b.nu)));
            for level in levels {
                match classes.last_mut() {
                    Some(c) if (level.s() - c.s).abs() <= GROUPING_TOLERANCE => c.levels.push(level),
                    _ => {
                        let mut c = new_class(&level);
                        c.levels.push(level);
                        classes.push(c);
                    }
                }
            }
        }
    }
    for c in &mut classes {
        c.levels.sort_by_key(|l| (l.nu, l.mu));
    }
    Ok(SpectrumTable {
        params: *params,
        max_s,
        exact: exact.is_some(),
        classes,
    })
}

fn new_class(level: &QuantumLevel) -> EnergyClass {
    EnergyClass {
        s: level.s(),
        energy: level.energy,
        levels: Vec::new(),
    }
}

/// Smallest index steps `(dmu, dnu)` of the symmetry that keep `s` fixed:
/// raising `nu` by `dnu` lowers `mu` by `dmu`.
pub fn symmetry_step(params: &CouplingParams) -> (u32, u32) {
    let (m, n) = (params.m(), params.n());
    match params.variant() {
        Variant::TwoParameter => {
            let g = (2 * m).gcd(&n);
            (2 * m / g, n / g)
        }
        Variant::OneParameter => (m, n),
    }
}

fn admissible(level: &QuantumLevel) -> bool {
    level.m_value * level.m_value < level.energy - GROUPING_TOLERANCE
}

/// Levels reachable from `seed` by repeated symmetry index maps in either
/// direction, keeping `mu, nu >= 0` and `M^2 < E`. Includes the seed.
pub fn symmetry_orbit(seed: &QuantumLevel, params: &CouplingParams) -> Vec<QuantumLevel> {
    let (dmu, dnu) = symmetry_step(params);
    let mut seen = BTreeSet::new();
    seen.insert((seed.nu, seed.mu));
    // raising direction: nu up, mu down
    let (mut mu, mut nu) = (seed.mu, seed.nu);
    while mu >= dmu {
        mu -= dmu;
        nu += dnu;
        if !admissible(&energy_level(mu, nu, params)) {
            break;
        }
        seen.insert((nu, mu));
    }
    let (mut mu, mut nu) = (seed.mu, seed.nu);
    while nu >= dnu {
        nu -= dnu;
        mu += dmu;
        if !admissible(&energy_level(mu, nu, params)) {
            break;
        }
        seen.insert((nu, mu));
    }
    seen.into_iter().map(|(nu, mu)| energy_level(mu, nu, params)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two(m: i64, n: i64, a: f64, b: f64) -> CouplingParams {
        CouplingParams::new(m, n, a, b, Variant::TwoParameter).unwrap()
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon_of(0, &two(1, 1, 0.5, 0.5)), 2.0);
        assert_eq!(epsilon_of(1, &two(1, 1, 0.5, 0.5)), 4.0);
        assert_eq!(epsilon_of(0, &two(1, 1, 1.0, 0.5)), 2.5);
        let one = CouplingParams::new(1, 1, 1.0, 0.0, Variant::OneParameter).unwrap();
        assert_eq!(epsilon_of(2, &one), 3.5);
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy_level(0, 0, &two(1, 1, 0.5, 0.5)).energy, 6.0);
        assert_eq!(energy_level(2, 0, &two(1, 1, 0.5, 0.5)).energy, 20.0);
        let l = energy_level(0, 0, &two(2, 1, 1.0, 0.5));
        assert_eq!(l.m_value, 5.0);
        assert_eq!(l.energy, 30.0);
        assert!(admissible(&l));
    }

    #[test]
    fn spectrum_examples() {
        let p = two(1, 1, 0.5, 0.5);
        let table = enumerate_spectrum(&p, 4.0).unwrap();
        assert!(table.exact);
        let c = table.classes.iter().find(|c| c.s == 4.0).unwrap();
        assert_eq!(c.energy, 20.0);
        let labels: Vec<(u32, u32)> = c.levels.iter().map(|l| (l.mu, l.nu)).collect();
        assert_eq!(labels, vec![(2, 0), (0, 1)]);

        let table = enumerate_spectrum(&p, 3.0).unwrap();
        assert_eq!(table.classes.len(), 2);
        assert_eq!(table.multiplicities(), vec![1, 1]);
        assert_eq!(table.classes[0].s, 2.0);
        assert_eq!(table.classes[1].s, 3.0);
    }

    #[test]
    fn energies_sorted_and_complete() {
        let p = two(2, 3, 0.3, 1.7);
        let t = enumerate_spectrum(&p, 15.0).unwrap();
        assert!(t.classes.windows(2).all(|w| w[0].energy < w[1].energy));
        let brute = (0..40u32)
            .flat_map(|nu| (0..40u32).map(move |mu| (mu, nu)))
            .filter(|&(mu, nu)| energy_level(mu, nu, &p).s() <= 15.0)
            .count();
        assert_eq!(t.level_count(), brute);
    }

    #[test]
    fn irrational_couplings_use_float_grouping() {
        let p = two(1, 1, 2f64.sqrt(), 0.5);
        let t = enumerate_spectrum(&p, 12.0).unwrap();
        assert!(!t.exact);
        for c in &t.classes {
            for l in &c.levels {
                assert_eq!(symmetry_orbit(l, &p).len(), c.multiplicity());
            }
        }
        // with k = 1 a nu step is absorbed by mu, so classes still coincide
        assert!(t.multiplicities().iter().any(|&m| m > 1));
    }

    #[test]
    fn irrational_coupling_one_parameter() {
        let p = CouplingParams::new(1, 1, 2f64.sqrt(), 0.0, Variant::OneParameter).unwrap();
        let t = enumerate_spectrum(&p, 10.0).unwrap();
        for c in &t.classes {
            for l in &c.levels {
                assert_eq!(symmetry_orbit(l, &p).len(), c.multiplicity());
            }
        }
    }

    #[test]
    fn cutoff_limit() {
        let p = two(1, 1, 0.5, 0.5);
        assert_eq!(
            enumerate_spectrum_with_limit(&p, 100.0, 10),
            Err(Error::CutoffTooLarge { limit: 10 })
        );
        assert!(enumerate_spectrum(&p, 0.0).is_err());
    }

    #[test]
    fn orbit_examples() {
        let p = two(1, 1, 0.5, 0.5);
        let orbit = symmetry_orbit(&energy_level(2, 0, &p), &p);
        let labels: Vec<(u32, u32)> = orbit.iter().map(|l| (l.mu, l.nu)).collect();
        assert_eq!(labels, vec![(2, 0), (0, 1)]);
        let orbit = symmetry_orbit(&energy_level(0, 1, &p), &p);
        assert_eq!(orbit.len(), 2);
        for p in [two(3, 2, 0.7, 0.2), two(1, 2, 0.5, 0.5)] {
            assert_eq!(symmetry_orbit(&energy_level(0, 0, &p), &p).len(), 1);
        }
    }

    #[test]
    fn orbit_size_matches_multiplicity() {
        for (m, n) in [(1, 1), (2, 1), (3, 1), (1, 2), (2, 3)] {
            let p = two(m, n, 0.5, 0.5);
            let t = enumerate_spectrum(&p, 12.0).unwrap();
            for c in &t.classes {
                for l in &c.levels {
                    let orbit = symmetry_orbit(l, &p);
                    assert_eq!(orbit.len(), c.multiplicity(), "k={m}/{n} seed {:?}", (l.mu, l.nu));
                    assert!(orbit.iter().all(|o| c.contains(o.mu, o.nu)));
                }
            }
        }
        let e20 = enumerate_spectrum(&two(1, 1, 0.5, 0.5), 12.0).unwrap();
        let c = e20.classes.iter().find(|c| c.energy == 20.0).unwrap();
        assert_eq!(c.multiplicity(), 2);
    }

    #[test]
    fn index_maps_preserve_energy() {
        for p in [two(2, 3, 0.5, 0.5), two(5, 4, 1.25, 0.75), two(1, 2, 0.5, 0.5)] {
            let (dmu, dnu) = symmetry_step(&p);
            for nu in 0..6 {
                let a = energy_level(dmu + 3, nu, &p);
                let b = energy_level(3, nu + dnu, &p);
                assert_relative_eq!(a.s(), b.s(), epsilon = 1e-12);
            }
        }
        assert_eq!(symmetry_step(&two(1, 2, 0.5, 0.5)), (1, 1));
        assert_eq!(symmetry_step(&two(2, 3, 0.5, 0.5)), (4, 3));
    }

    #[test]
    fn json_layout() {
        let p = two(1, 1, 0.5, 0.5);
        let v = enumerate_spectrum(&p, 4.0).unwrap().to_json();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, vec!["classes", "params"]);
        let last = v["classes"].as_array().unwrap().last().unwrap();
        assert_eq!(last["energy"], 20.0);
        assert_eq!(last["levels"], json!([[2, 0], [0, 1]]));
    }

    #[test]
    fn fraction_detection() {
        assert_eq!(as_fraction(0.5), Some(Ratio::new(1, 2)));
        assert_eq!(as_fraction(1.25), Some(Ratio::new(5, 4)));
        assert_eq!(as_fraction(2f64.sqrt()), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn orbit_lies_in_class(m in 1i64..5, n in 1i64..5, a2 in 0u32..6, b2 in 0u32..6) {
                let p = match CouplingParams::new(m, n, a2 as f64 / 2.0, b2 as f64 / 2.0, Variant::TwoParameter) {
                    Ok(p) => p,
                    Err(_) => return Ok(()),
                };
                let t = enumerate_spectrum(&p, 10.0).unwrap();
                for c in &t.classes {
                    prop_assert!(c.multiplicity() >= 1);
                    for l in &c.levels {
                        prop_assert_eq!(symmetry_orbit(l, &p).len(), c.multiplicity());
                    }
                }
            }
        }
    }
}
