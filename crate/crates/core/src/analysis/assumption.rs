use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discretization::{DifferenceOperator, KineticOperator, PotentialOperator, SpatialGrid, StateVector};
use crate::error::{Error, Result};

/// Empirical constants of the commutator assumptions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionConstants {
    /// `max ‖[H1,H2]v‖⋆ / (‖D1 v‖⋆ + ‖v‖⋆)`.
    pub c1: f64,
    /// `max ‖[H1,[H1,H2]]v‖⋆ / (‖H1 v‖⋆ + ‖v‖⋆)`.
    pub c2: f64,
    pub samples: usize,
    pub description: String,
}

/// Test vectors: `cos(kx)` for `k ≤ 4`, `sin(kx)` for `1 ≤ k ≤ 5`, `random` seeded
/// Gaussian unit vectors, and the 10 Fourier modes closest to the Nyquist frequency.
/// Here `x` is mapped to `[0, 2π)` across the grid.
pub fn sample_family(grid: SpatialGrid, seed: u64, random: usize) -> Vec<StateVector> {
    let n = grid.n();
    let omega = 2.0 * PI / grid.length();
    let lo = grid.x_lo();
    let mut out = Vec::with_capacity(20 + random);
    for k in 0..=4 {
        out.push(StateVector::sample_function(|x| (k as f64 * omega * (x - lo)).cos(), grid).expect("finite"));
    }
    for k in 1..=5 {
        out.push(StateVector::sample_function(|x| (k as f64 * omega * (x - lo)).sin(), grid).expect("finite"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        out.push(StateVector::random_unit(grid, &mut rng));
    }
    let top = n / 2;
    for offset in 0..10 {
        let m = (top + n - 5 + offset) % n;
        let amps = (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * (m * k % n) as f64 / n as f64)).collect();
        out.push(StateVector::new(grid, amps).expect("finite"));
    }
    out
}

/// The default 50-vector family.
pub fn standard_sample_family(grid: SpatialGrid, seed: u64) -> Vec<StateVector> {
    sample_family(grid, seed, 30)
}

/// `[H1, H2] v`, matrix-free.
pub fn apply_commutator(kinetic: &KineticOperator, potential: &PotentialOperator, v: &StateVector) -> Result<StateVector> {
    let a = kinetic.apply(&potential.apply(v)?)?;
    let b = potential.apply(&kinetic.apply(v)?)?;
    a.sub(&b)
}

/// `[H1, [H1, H2]] v`, matrix-free.
pub fn apply_double_commutator(
    kinetic: &KineticOperator,
    potential: &PotentialOperator,
    v: &StateVector,
) -> Result<StateVector> {
    let a = kinetic.apply(&apply_commutator(kinetic, potential, v)?)?;
    let b = apply_commutator(kinetic, potential, &kinetic.apply(v)?)?;
    a.sub(&b)
}

pub fn estimate_assumption_constants(
    kinetic: &KineticOperator,
    potential: &PotentialOperator,
    difference: &DifferenceOperator,
    samples: &[StateVector],
) -> Result<AssumptionConstants> {
    if samples.is_empty() {
        return Err(Error::invalid("no sample vectors"));
    }
    let mut c1 = 0.0f64;
    let mut c2 = 0.0f64;
    for v in samples {
        let norm = v.rescaled_norm();
        if norm == 0.0 {
            return Err(Error::invalid("zero-norm sample vector"));
        }
        let comm = apply_commutator(kinetic, potential, v)?.rescaled_norm();
        let dv = difference.apply(v)?.rescaled_norm();
        c1 = c1.max(comm / (dv + norm));
        let double = apply_double_commutator(kinetic, potential, v)?.rescaled_norm();
        let hv = kinetic.apply(v)?.rescaled_norm();
        c2 = c2.max(double / (hv + norm));
    }
    if !(c1.is_finite() && c2.is_finite()) {
        return Err(Error::NonFinite("assumption constant".into()));
    }
    Ok(AssumptionConstants {
        c1,
        c2,
        samples: samples.len(),
        description: format!("{} vectors: smooth modes, seeded random, near-Nyquist modes", samples.len()),
    })
}

/// Outcome of the exchange check `‖H1 e^{iξH2} v‖ ≤ 2 (‖H1 v‖ + ‖v‖)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeReport {
    pub xi: f64,
    /// Largest admissible `|ξ| = 1 / (2 (C1 + ‖H2‖))`.
    pub xi_cap: f64,
    pub max_ratio: f64,
    pub samples: usize,
    pub passed: bool,
}

pub fn exchange_xi_cap(c1: f64, h2_norm: f64) -> f64 {
    0.5 / (c1 + h2_norm)
}

pub fn check_exchange_bound(
    kinetic: &KineticOperator,
    potential: &PotentialOperator,
    c1: f64,
    xi: f64,
    samples: &[StateVector],
) -> Result<ExchangeReport> {
    let cap = exchange_xi_cap(c1, potential.norm());
    if (c1 + potential.norm()) * xi.abs() > 0.5 * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!("|xi| = {} exceeds the cap {cap}", xi.abs())));
    }
    let mut max_ratio = 0.0f64;
    for v in samples {
        let rotated = potential.apply_exp(-xi, v)?;
        let lhs = kinetic.apply(&rotated)?.norm2();
        let rhs = kinetic.apply(v)?.norm2() + v.norm2();
        if rhs == 0.0 {
            return Err(Error::invalid("zero-norm sample vector"));
        }
        max_ratio = max_ratio.max(lhs / rhs);
    }
    Ok(ExchangeReport { xi, xi_cap: cap, max_ratio, samples: samples.len(), passed: max_ratio <= 2.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::Potential;

    fn setup(n: usize, v: Potential) -> (KineticOperator, PotentialOperator, DifferenceOperator) {
        let g = SpatialGrid::symmetric_2pi(n).unwrap();
        (KineticOperator::finite_difference(g), PotentialOperator::build(v, g).unwrap(), DifferenceOperator::first_difference(g))
    }

    #[test]
    fn family_size_and_determinism() {
        let g = SpatialGrid::symmetric_2pi(32).unwrap();
        let a = standard_sample_family(g, 3);
        assert_eq!(a.len(), 50);
        assert_eq!(a, standard_sample_family(g, 3));
        assert_eq!(sample_family(g, 3, 80).len(), 100);
    }

    #[test]
    fn constant_potential_gives_zero() {
        let (k, p, d) = setup(32, Potential::constant(2.0));
        let s = standard_sample_family(*k.grid(), 1);
        let c = estimate_assumption_constants(&k, &p, &d, &s).unwrap();
        assert!(c.c1 < 1e-9 && c.c2 < 1e-9);
    }

    #[test]
    fn matrix_free_commutators_match_dense() {
        let (k, p, _) = setup(16, Potential::one_minus_cos());
        let v = StateVector::random_unit(*k.grid(), &mut ChaCha8Rng::seed_from_u64(4));
        let c12 = crate::analysis::commutator(k.dense().unwrap(), &p.dense().unwrap()).unwrap();
        let c112 = crate::analysis::commutator(k.dense().unwrap(), &c12).unwrap();
        let x = nalgebra::DVector::from_column_slice(v.amplitudes());
        for (m, got) in [(c12, apply_commutator(&k, &p, &v).unwrap()), (c112, apply_double_commutator(&k, &p, &v).unwrap())] {
            let dense = &m * &x;
            let diff: f64 = dense.iter().zip(got.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(diff < 1e-9 * m.norm(), "{diff}");
        }
    }

    #[test]
    fn exchange_examples() {
        let (k, p, d) = setup(64, Potential::one_minus_cos());
        let s = sample_family(*k.grid(), 9, 80);
        let c = estimate_assumption_constants(&k, &p, &d, &s).unwrap();
        let r = check_exchange_bound(&k, &p, c.c1, 0.0, &s).unwrap();
        assert!(r.max_ratio < 1.0);
        let cap = exchange_xi_cap(c.c1, p.norm());
        let r = check_exchange_bound(&k, &p, c.c1, cap, &s).unwrap();
        assert!(r.passed && r.max_ratio <= 2.0);
        assert!(matches!(check_exchange_bound(&k, &p, c.c1, 1.01 * cap, &s), Err(Error::Precondition(_))));
        let (k, p, _) = setup(64, Potential::constant(0.3));
        let r = check_exchange_bound(&k, &p, 0.0, 1.0, &s).unwrap();
        assert!(r.max_ratio < 1.0);
    }
}
