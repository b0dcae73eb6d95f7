//! Central-difference discretizations of the one-dimensional Pöschl–Teller
//! Hamiltonians and grid versions of the ladder and shift operators.
//!
//! The theta Hamiltonian `-Θ'' - cotθ Θ' + M²/sin²θ Θ` is reduced with
//! `Θ = u / √sinθ` to `-u'' + (M² - 1/4)/sin²θ u = (E + 1/4) u`. Grid
//! eigenvalues reported for it are `E`, i.e. the reduced eigenvalue minus
//! 1/4. Eigenvectors are always the reduced `u`, normalized so that
//! `Σ u_i² h = 1`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::tridiag::SymTridiagonal;
use crate::error::{Error, Result};

pub const MIN_GRID_SIZE: usize = 200;
pub const DEFAULT_EIGEN_COUNT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridPotential {
    /// `(α² - 1/4)/cos²φ + (β² - 1/4)/sin²φ` on `(0, π/2)`.
    TwoParamPT { alpha: f64, beta: f64 },
    /// `(α² - 1/4)/cos²φ` on `(-π/2, π/2)`.
    OneParamPT { alpha: f64 },
    /// Reduced theta problem at fixed `M` on `(0, π)`.
    ThetaPT { m_value: f64 },
}

impl GridPotential {
    pub fn domain(&self) -> (f64, f64) {
        match self {
            GridPotential::TwoParamPT { .. } => (0.0, FRAC_PI_2),
            GridPotential::OneParamPT { .. } => (-FRAC_PI_2, FRAC_PI_2),
            GridPotential::ThetaPT { .. } => (0.0, PI),
        }
    }

    fn value(&self, x: f64) -> f64 {
        match *self {
            GridPotential::TwoParamPT { alpha, beta } => {
                (alpha * alpha - 0.25) / x.cos().powi(2) + (beta * beta - 0.25) / x.sin().powi(2)
            }
            GridPotential::OneParamPT { alpha } => (alpha * alpha - 0.25) / x.cos().powi(2),
            GridPotential::ThetaPT { m_value } => (m_value * m_value - 0.25) / x.sin().powi(2),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            GridPotential::TwoParamPT { alpha, beta } => alpha >= 0.0 && beta >= 0.0 && alpha.is_finite() && beta.is_finite(),
            GridPotential::OneParamPT { alpha } => alpha >= 0.0 && alpha.is_finite(),
            GridPotential::ThetaPT { m_value } => m_value > 0.0 && m_value.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid potential {self:?}")))
        }
    }

    /// Phi ladder index of the `index`-th level.
    fn epsilon(&self, index: usize) -> Option<f64> {
        match *self {
            GridPotential::TwoParamPT { alpha, beta } => Some(alpha + beta + 2.0 * index as f64 + 1.0),
            GridPotential::OneParamPT { alpha } => Some(alpha + index as f64 + 0.5),
            GridPotential::ThetaPT { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpectrum {
    pub potential: GridPotential,
    pub grid_size: usize,
    pub step: f64,
    pub nodes: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl GridSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    fn vector(&self, index: usize) -> Result<&[f64]> {
        self.vectors.get(index).map(Vec::as_slice).ok_or(Error::IndexOutOfRange {
            index,
            available: self.len(),
        })
    }
}

pub fn grid_eigensolve(potential: GridPotential, grid_size: usize) -> Result<GridSpectrum> {
    grid_eigensolve_count(potential, grid_size, DEFAULT_EIGEN_COUNT)
}

/// Lowest `count` eigenpairs on `grid_size` interior nodes with Dirichlet
/// conditions at the domain ends.
pub fn grid_eigensolve_count(potential: GridPotential, grid_size: usize, count: usize) -> Result<GridSpectrum> {
    potential.validate()?;
    if grid_size < MIN_GRID_SIZE {
        return Err(Error::InvalidArgument(format!("grid size {grid_size} below {MIN_GRID_SIZE}")));
    }
    let (lo, hi) = potential.domain();
    let step = (hi - lo) / (grid_size + 1) as f64;
    let nodes: Vec<f64> = (1..=grid_size).map(|i| lo + i as f64 * step).collect();
    let inv = 1.0 / (step * step);
    let diag = nodes.iter().map(|&x| 2.0 * inv + potential.value(x)).collect();
    let matrix = SymTridiagonal::new(diag, vec![-inv; grid_size - 1])?;
    let shift = if matches!(potential, GridPotential::ThetaPT { .. }) { 0.25 } else { 0.0 };
    let norm = step.sqrt().recip();
    let (eigenvalues, vectors) = matrix
        .lowest(count)?
        .into_iter()
        .map(|(lambda, v)| (lambda - shift, v.into_iter().map(|x| x * norm).collect()))
        .unzip();
    Ok(GridSpectrum {
        potential,
        grid_size,
        step,
        nodes,
        eigenvalues,
        vectors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridOperator {
    /// Phi ladder raising, `eps -> eps + step`.
    RaiseB,
    LowerB,
    /// Theta shift `(M - 1, mu + 1) -> (M, mu)`; applied to the lower family.
    RaiseA,
    /// Theta shift `(M, mu) -> (M - 1, mu + 1)`.
    LowerA,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOperatorCheck {
    pub operator: GridOperator,
    pub grid_size: usize,
    pub domain: (f64, f64),
    pub eigen_index: usize,
    pub target_index: Option<usize>,
    /// `|<O u, v>| / (|O u| |v|)`; zero when there is no target.
    pub overlap: f64,
    /// `|O u| / |u|`.
    pub image_norm: f64,
}

/// Central differences with zero boundary values outside the grid.
fn derivative_dirichlet(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|i| {
            let next = if i + 1 < n { f[i + 1] } else { 0.0 };
            let prev = if i > 0 { f[i - 1] } else { 0.0 };
            (next - prev) / (2.0 * h)
        })
        .collect()
}

/// Central differences inside, second-order one-sided at the two ends.
fn derivative_free(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
            } else if i + 1 == n {
                (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h)
            } else {
                (f[i + 1] - f[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64], h: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * h
}

fn norm(a: &[f64], h: f64) -> f64 {
    dot(a, a, h).sqrt()
}

fn theta_m(potential: &GridPotential) -> Result<f64> {
    match *potential {
        GridPotential::ThetaPT { m_value } => Ok(m_value),
        _ => Err(Error::InvalidArgument("shift operators act on theta spectra".into())),
    }
}

fn apply_ladder(spectrum: &GridSpectrum, op: GridOperator, index: usize) -> Result<Vec<f64>> {
    let u = spectrum.vector(index)?;
    let h = spectrum.step;
    let eps = spectrum
        .potential
        .epsilon(index)
        .ok_or_else(|| Error::InvalidArgument("ladder operators act on phi spectra".into()))?;
    let du = derivative_dirichlet(u, h);
    let out = spectrum.nodes.iter().zip(u).zip(&du).map(|((&x, &f), &df)| match (spectrum.potential, op) {
        (GridPotential::TwoParamPT { alpha, beta }, GridOperator::RaiseB) => {
            (eps + 1.0) * (2.0 * x).sin() * df + (eps * (eps + 1.0) * (2.0 * x).cos() - alpha * alpha + beta * beta) * f
        }
        (GridPotential::TwoParamPT { alpha, beta }, _) => {
            -(eps - 1.0) * (2.0 * x).sin() * df + (eps * (eps - 1.0) * (2.0 * x).cos() - alpha * alpha + beta * beta) * f
        }
        (_, GridOperator::RaiseB) => -x.cos() * df + eps * x.sin() * f,
        _ => x.cos() * df + eps * x.sin() * f,
    });
    Ok(out.collect())
}

/// Shift operator on the reduced vector: `u -> √sin · O(u/√sin)`.
fn apply_shift(spectrum: &GridSpectrum, op: GridOperator, index: usize) -> Result<Vec<f64>> {
    let m = theta_m(&spectrum.potential)?;
    let u = spectrum.vector(index)?;
    let roots: Vec<f64> = spectrum.nodes.iter().map(|x| x.sin().sqrt()).collect();
    let big_theta: Vec<f64> = u.iter().zip(&roots).map(|(a, r)| a / r).collect();
    let d = derivative_dirichlet(&big_theta, spectrum.step);
    // lowering at M: ∂ + M cot; raising onto M from M - 1: -∂ + (M - 1) cot
    let (sign, coupling) = match op {
        GridOperator::LowerA => (1.0, m),
        _ => (-1.0, m),
    };
    Ok(spectrum
        .nodes
        .iter()
        .enumerate()
        .map(|(i, x)| roots[i] * (sign * d[i] + coupling / x.tan() * big_theta[i]))
        .collect())
}

/// Applies `op` to the `index`-th eigenvector of `source` and compares the
/// image with the expected eigenvector of `target`. Ladder operators stay
/// within one phi spectrum (`target` must match `source`); `LowerA` maps
/// the `M` theta spectrum into the `M - 1` one and `RaiseA` back.
pub fn ladder_action_check(
    source: &GridSpectrum,
    target: &GridSpectrum,
    op: GridOperator,
    index: usize,
) -> Result<GridOperatorCheck> {
    if source.grid_size != target.grid_size {
        return Err(Error::InvalidArgument("source and target grids differ".into()));
    }
    let (image, target_index) = match op {
        GridOperator::RaiseB | GridOperator::LowerB => {
            if source.potential != target.potential {
                return Err(Error::InvalidArgument("ladder check needs one phi spectrum".into()));
            }
            let t = if op == GridOperator::RaiseB { Some(index + 1) } else { index.checked_sub(1) };
            (apply_ladder(source, op, index)?, t)
        }
        GridOperator::LowerA | GridOperator::RaiseA => {
            let (ms, mt) = (theta_m(&source.potential)?, theta_m(&target.potential)?);
            let expected = if op == GridOperator::LowerA { ms - 1.0 } else { ms + 1.0 };
            if (mt - expected).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!("target M = {mt}, expected {expected}")));
            }
            let t = if op == GridOperator::LowerA { Some(index + 1) } else { index.checked_sub(1) };
            (apply_shift(source, op, index)?, t)
        }
    };
    let h = source.step;
    let image_norm = norm(&image, h) / norm(source.vector(index)?, h);
    let overlap = match target_index {
        Some(t) => {
            let v = target.vector(t)?;
            dot(&image, v, h).abs() / (norm(&image, h) * norm(v, h))
        }
        None => 0.0,
    };
    Ok(GridOperatorCheck {
        operator: op,
        grid_size: source.grid_size,
        domain: source.potential.domain(),
        eigen_index: index,
        target_index,
        overlap,
        image_norm,
    })
}

/// Relative residual of `Â⁺_M Â⁻_M Θ + M(M - 1) Θ = E Θ` for the
/// `index`-th theta eigenvector, measured in the reduced norm.
pub fn shift_factorization_residual(spectrum: &GridSpectrum, index: usize) -> Result<f64> {
    let m = theta_m(&spectrum.potential)?;
    let u = spectrum.vector(index)?;
    let e = spectrum.eigenvalues[index];
    let h = spectrum.step;
    let roots: Vec<f64> = spectrum.nodes.iter().map(|x| x.sin().sqrt()).collect();
    let cot: Vec<f64> = spectrum.nodes.iter().map(|x| 1.0 / x.tan()).collect();
    let big_theta: Vec<f64> = u.iter().zip(&roots).map(|(a, r)| a / r).collect();
    let d = derivative_dirichlet(&big_theta, h);
    let lowered: Vec<f64> = (0..u.len()).map(|i| d[i] + m * cot[i] * big_theta[i]).collect();
    // the lowered function need not vanish at the ends
    let dl = derivative_free(&lowered, h);
    let residual: Vec<f64> = (0..u.len())
        .map(|i| {
            let composed = -dl[i] + (m - 1.0) * cot[i] * lowered[i] + m * (m - 1.0) * big_theta[i];
            roots[i] * (composed - e * big_theta[i])
        })
        .collect();
    Ok(norm(&residual, h) / (e.abs() * norm(u, h)))
}
