//! Numerical check of the integral error representation of the first-order generalized step.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::commutator;
use crate::controls::ControlPair;
use crate::discretization::{CMatrix, KineticOperator, PotentialOperator};
use crate::error::{Error, Result};
use crate::numerics::gauss_legendre;
use crate::propagators::{Propagator, Scheme};

/// Largest grid for which the representation is evaluated.
pub const REPRESENTATION_MAX_N: usize = 64;
/// Tolerance of the dense reference propagators used by the check.
pub const REPRESENTATION_REFERENCE_TOL: f64 = 1e-11;

/// `(quadrature points, Frobenius residual)` for each order tried.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationCheck {
    pub h: f64,
    pub points: usize,
    pub residual: f64,
    /// Frobenius norm of `U_g1(h,0) - U(h,0)`.
    pub error_norm: f64,
    pub history: Vec<(usize, f64)>,
}

struct Ingredients {
    n: usize,
    values: Vec<f64>,
    comm: CMatrix,
    lhs: CMatrix,
}

fn diagonal_phase(values: &[f64], angle: f64) -> Vec<Complex64> {
    values.iter().map(|v| Complex64::from_polar(1.0, -angle * v)).collect()
}

fn ingredients(prop: &Propagator<'_>, h: f64) -> Result<Ingredients> {
    let n = prop.n();
    if n > REPRESENTATION_MAX_N {
        return Err(Error::DenseCap { n, cap: REPRESENTATION_MAX_N });
    }
    if !(h > 0.0 && h <= 0.1) {
        return Err(Error::invalid(format!("step must lie in (0, 0.1], got {h}")));
    }
    let comm = commutator(prop.kinetic().dense()?, &prop.potential().dense()?)?;
    let g1 = prop.dense_propagator(Scheme::G1, 0.0, h, 1)?;
    let exact = prop.dense_reference(0.0, h, REPRESENTATION_REFERENCE_TOL)?.matrix;
    Ok(Ingredients { n, values: prop.potential().values().to_vec(), comm, lhs: g1 - exact })
}

fn representation(prop: &Propagator<'_>, ing: &Ingredients, h: f64, points: usize) -> Result<CMatrix> {
    let controls = prop.controls();
    let (nodes, weights) = gauss_legendre(points);
    let n = ing.n;
    let mut total = CMatrix::zeros(n, n);
    for (xs, ws) in nodes.iter().zip(&weights) {
        let s = 0.5 * h * (xs + 1.0);
        let ws = 0.5 * h * ws;
        // inner integral over [0, s] of f2(σ) e^{iF2(σ)H2} [H1,H2] e^{-iF2(σ)H2}
        let mut inner = CMatrix::zeros(n, n);
        for (xq, wq) in nodes.iter().zip(&weights) {
            let sigma = 0.5 * s * (xq + 1.0);
            let wq = 0.5 * s * wq;
            let f2 = controls.f2.eval(sigma, 0)?;
            let phase = diagonal_phase(&ing.values, -controls.f2.integrate(0.0, sigma)?);
            for j in 0..n {
                for k in 0..n {
                    inner[(j, k)] += phase[j] * ing.comm[(j, k)] * phase[k].conj() * (wq * f2);
                }
            }
        }
        let f1 = controls.f1.eval(s, 0)?;
        let potential_phase = diagonal_phase(&ing.values, controls.f2.integrate(0.0, s)?);
        let kinetic_exp = prop.kinetic().dense_exp(controls.f1.integrate(0.0, s)?)?;
        let mut middle = inner * Complex64::new(f1, 0.0);
        for j in 0..n {
            for k in 0..n {
                middle[(j, k)] *= potential_phase[j];
            }
        }
        let forward = if s < h {
            prop.dense_reference(s, h, REPRESENTATION_REFERENCE_TOL)?.matrix
        } else {
            CMatrix::identity(n, n)
        };
        total += forward * middle * kinetic_exp * Complex64::new(ws, 0.0);
    }
    Ok(total)
}

/// Frobenius residual between `U_g1(h,0) - U(h,0)` and its integral
/// representation evaluated with `points` Gauss–Legendre nodes per axis.
pub fn verify_error_representation_g1(
    controls: &ControlPair,
    kinetic: &KineticOperator,
    potential: &PotentialOperator,
    h: f64,
    points: usize,
) -> Result<f64> {
    let prop = Propagator::new(controls, kinetic, potential)?;
    let ing = ingredients(&prop, h)?;
    Ok((&ing.lhs - representation(&prop, &ing, h, points.max(1))?).norm())
}

/// Doubles the quadrature order from 2 until the residual changes by less than 10%
/// (or `max_points` is reached).
pub fn error_representation_convergence(
    controls: &ControlPair,
    kinetic: &KineticOperator,
    potential: &PotentialOperator,
    h: f64,
    max_points: usize,
) -> Result<RepresentationCheck> {
    let prop = Propagator::new(controls, kinetic, potential)?;
    let ing = ingredients(&prop, h)?;
    let mut history = Vec::new();
    let mut points = 2;
    let mut previous = f64::INFINITY;
    loop {
        let residual = (&ing.lhs - representation(&prop, &ing, h, points)?).norm();
        history.push((points, residual));
        let settled = (previous - residual).abs() < 0.1 * previous;
        if settled || points * 2 > max_points {
            return Ok(RepresentationCheck { h, points, residual, error_norm: ing.lhs.norm(), history });
        }
        previous = residual;
        points *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controls::ControlPreset;
    use crate::discretization::{Potential, SpatialGrid};

    #[test]
    fn constant_potential_has_zero_kernel() {
        let g = SpatialGrid::symmetric_2pi(8).unwrap();
        let k = KineticOperator::finite_difference(g);
        let p = PotentialOperator::build(Potential::constant(1.5), g).unwrap();
        let pair = ControlPreset::OscillatingMass { a: 1.0 }.build(0.1).unwrap();
        let r = verify_error_representation_g1(&pair, &k, &p, 1e-2, 4).unwrap();
        assert!(r < 1e-11, "{r}");
    }

    #[test]
    fn rejects_large_grids_and_steps() {
        let g = SpatialGrid::symmetric_2pi(128).unwrap();
        let k = KineticOperator::finite_difference(g);
        let p = PotentialOperator::build(Potential::one_minus_cos(), g).unwrap();
        let pair = ControlPreset::OscillatingMass { a: 1.0 }.build(1.0).unwrap();
        assert!(matches!(verify_error_representation_g1(&pair, &k, &p, 1e-2, 4), Err(Error::DenseCap { .. })));
        let g = SpatialGrid::symmetric_2pi(8).unwrap();
        let k = KineticOperator::finite_difference(g);
        let p = PotentialOperator::build(Potential::one_minus_cos(), g).unwrap();
        assert!(verify_error_representation_g1(&pair, &k, &p, 0.5, 4).is_err());
    }
}
