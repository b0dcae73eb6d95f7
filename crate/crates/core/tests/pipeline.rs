//! Cross-module checks: synthesized orbits against integrated motion, and
//! the level formula against grid eigenvalues.

use lissajous_core::algebra::MotionConstants;
use lissajous_core::dynamics::{frequencies, initial_state, integrate, orbit_from_phases};
use lissajous_core::quantum::{energy_level, enumerate_spectrum, grid_eigensolve, GridPotential};
use lissajous_core::{CouplingParams, EnergyData, Variant};

#[test]
fn orbit_follows_the_integrated_motion() {
    let cases = [
        (CouplingParams::new(2, 3, 1.0, 0.0, Variant::OneParameter).unwrap(), 4.0, 2.0),
        (CouplingParams::new(3, 2, 1.0, 0.5, Variant::TwoParameter).unwrap(), 30.0, 5.0),
    ];
    for (p, e_theta, e_phi) in cases {
        let energies = EnergyData::new(e_theta, e_phi, &p).unwrap();
        let start = initial_state(&energies, &p, -1.1).unwrap();
        let span = p.n() as f64 * frequencies(&energies, &p).period_theta;
        // a step that divides the span so orbit samples land on the grid
        let steps = 200 * (span / (200.0 * 1e-4)).round() as usize;
        let dt = span / steps as f64;
        let traj = integrate(&start, &p, dt, steps).unwrap();
        let orbit = orbit_from_phases(&energies, &p, -1.1, 201).unwrap();
        for (i, pt) in orbit.iter().enumerate() {
            let sample = traj.samples()[i * steps / 200];
            assert!((sample.t - pt.t).abs() < 1e-9);
            let s = sample.state;
            assert!((s.theta - pt.theta).abs() < 1e-6, "{p:?} t={}", pt.t);
            assert!((s.phi - pt.phi).abs() < 1e-6, "{p:?} t={}", pt.t);
            assert!((s.p_theta - pt.p_theta).abs() < 1e-5 * (1.0 + s.p_theta.abs()));
            assert!((s.p_phi - pt.p_phi).abs() < 1e-5 * (1.0 + s.p_phi.abs()));
        }
        let end = traj.samples().last().unwrap();
        let c = MotionConstants::from_state(&end.state, &p, end.t).unwrap();
        assert!((c.phi0 + 1.1).abs() < 1e-6);
    }
}

#[test]
fn level_formula_matches_grid_spectra() {
    let p = CouplingParams::new(2, 3, 0.5, 1.5, Variant::TwoParameter).unwrap();
    let phi = grid_eigensolve(GridPotential::TwoParamPT { alpha: 0.5, beta: 1.5 }, 2000).unwrap();
    for nu in 0..3u32 {
        let level = energy_level(0, nu, &p);
        let eps = phi.eigenvalues[nu as usize].sqrt();
        assert!((eps - level.epsilon).abs() / level.epsilon < 1e-4);
        let theta = grid_eigensolve(GridPotential::ThetaPT { m_value: level.m_value }, 2000).unwrap();
        for mu in 0..3u32 {
            let want = energy_level(mu, nu, &p).energy;
            let got = theta.eigenvalues[mu as usize];
            assert!((got - want).abs() / want < 1e-3, "nu={nu} mu={mu}: {got} vs {want}");
        }
    }
    // degenerate labels really share one grid energy
    let table = enumerate_spectrum(&p, 8.0).unwrap();
    let class = table.classes.iter().find(|c| c.multiplicity() > 1).expect("a degenerate class");
    let energies: Vec<f64> = class
        .levels
        .iter()
        .map(|l| {
            let s = grid_eigensolve(GridPotential::ThetaPT { m_value: l.m_value }, 2000).unwrap();
            s.eigenvalues[l.mu as usize]
        })
        .collect();
    for e in &energies {
        assert!((e - class.energy).abs() / class.energy < 1e-3);
    }
}

#[test]
fn one_parameter_levels_match_grid() {
    let p = CouplingParams::new(3, 1, 1.0, 0.0, Variant::OneParameter).unwrap();
    let phi = grid_eigensolve(GridPotential::OneParamPT { alpha: 1.0 }, 2000).unwrap();
    for nu in 0..4u32 {
        let eps = energy_level(0, nu, &p).epsilon;
        assert!((phi.eigenvalues[nu as usize] - eps * eps).abs() / (eps * eps) < 1e-3);
    }
}
