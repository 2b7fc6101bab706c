use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::discretization::{CMatrix, KineticOperator, PotentialOperator};
use crate::error::{Error, Result};

/// Default relative tolerance of [`operator_norm`].
pub const OPERATOR_NORM_TOL: f64 = 1e-8;
/// Iteration cap of [`operator_norm`].
pub const MAX_POWER_ITERATIONS: usize = 100_000;
/// Largest size at which [`estimate_operator_norm`] uses an exact singular value decomposition.
pub const EXACT_NORM_MAX_N: usize = 256;

const POWER_SEED: u64 = 0x5eed_0f_4a11;
const MAX_RESTARTS: usize = 3;

fn check_square_pair(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!("{:?} and {:?}", a.shape(), b.shape())));
    }
    Ok(())
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_square_pair(a, b)?;
    Ok(a * b - b * a)
}

/// `[A, [B, C]]`.
pub fn nested_commutator(a: &CMatrix, b: &CMatrix, c: &CMatrix) -> Result<CMatrix> {
    commutator(a, &commutator(b, c)?)
}

/// `√(‖M‖₁ ‖M‖∞)`, an upper bound on the spectral norm.
pub fn one_inf_norm_bound(m: &CMatrix) -> f64 {
    let max_col = m.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let max_row = m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    (max_col * max_row).sqrt()
}

/// Largest singular value by power iteration on `M†M`.
///
/// Iterates until the Rayleigh quotient changes by less than `tol` relative;
/// a run whose iterate collapses to zero is restarted from a fresh random
/// vector, and a second start confirms the value. Returns the largest estimate.
pub fn operator_norm(m: &CMatrix, tol: f64) -> Result<f64> {
    let n = m.ncols();
    if n == 0 || m.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let adjoint = m.adjoint();
    let mut estimates = Vec::new();
    let mut attempts = 0;
    while attempts <= MAX_RESTARTS {
        attempts += 1;
        match power_run(m, &adjoint, tol, &mut rng)? {
            Some(sigma) => estimates.push(sigma),
            None => continue,
        }
        if estimates.len() >= 2 {
            let hi = estimates.iter().cloned().fold(0.0, f64::max);
            let lo = estimates.iter().cloned().fold(f64::INFINITY, f64::min);
            if hi - lo <= 10.0 * tol * hi {
                break;
            }
        }
    }
    estimates
        .into_iter()
        .reduce(f64::max)
        .ok_or_else(|| Error::Accuracy { what: "power iteration stagnated on every restart".into(), achieved: 0.0 })
}

fn power_run(m: &CMatrix, adjoint: &CMatrix, tol: f64, rng: &mut ChaCha8Rng) -> Result<Option<f64>> {
    let n = m.ncols();
    let mut v = DVector::from_fn(n, |_, _| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    v /= Complex64::new(v.norm(), 0.0);
    let mut previous = 0.0;
    for _ in 0..MAX_POWER_ITERATIONS {
        let w = m * &v;
        let rayleigh = w.norm_squared();
        let x = adjoint * w;
        let norm = x.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Ok(None);
        }
        v = x / Complex64::new(norm, 0.0);
        if (rayleigh - previous).abs() <= tol * rayleigh {
            return Ok(Some(rayleigh.sqrt()));
        }
        previous = rayleigh;
    }
    Err(Error::Accuracy {
        what: format!("power iteration did not converge in {MAX_POWER_ITERATIONS} iterations"),
        achieved: previous.sqrt(),
    })
}

/// Largest singular value from a full singular value decomposition.
pub fn operator_norm_exact(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Exact norm for `n ≤ EXACT_NORM_MAX_N`, power iteration above.
pub fn estimate_operator_norm(m: &CMatrix) -> Result<f64> {
    if m.ncols() <= EXACT_NORM_MAX_N {
        Ok(operator_norm_exact(m))
    } else {
        operator_norm(m, OPERATOR_NORM_TOL)
    }
}

/// Spectral norms of `H1`, `H2` and the commutators entering the error bounds.
/// Any entry may be absent when not needed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct OperatorNorms {
    pub h1: Option<f64>,
    pub h2: Option<f64>,
    /// `‖[H1, H2]‖`.
    pub c12: Option<f64>,
    /// `‖[H1, [H1, H2]]‖`.
    pub c112: Option<f64>,
    /// `‖[H2, [H2, H1]]‖`, equal to `‖[H2, [H1, H2]]‖`.
    pub c221: Option<f64>,
}

impl OperatorNorms {
    /// All five norms from dense matrices.
    pub fn compute(kinetic: &KineticOperator, potential: &PotentialOperator) -> Result<Self> {
        let h1 = kinetic.dense()?;
        let h2 = potential.dense()?;
        let c12 = commutator(h1, &h2)?;
        let c112 = commutator(h1, &c12)?;
        let c221 = commutator(&h2, &commutator(&h2, h1)?)?;
        Ok(Self {
            h1: Some(kinetic.norm()),
            h2: Some(potential.norm()),
            c12: Some(estimate_operator_norm(&c12)?),
            c112: Some(estimate_operator_norm(&c112)?),
            c221: Some(estimate_operator_norm(&c221)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::SpatialGrid;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn real(n: usize, values: &[f64]) -> CMatrix {
        CMatrix::from_row_iterator(n, n, values.iter().map(|&x| Complex64::new(x, 0.0)))
    }

    fn small_example_n3() -> (CMatrix, CMatrix) {
        let g = SpatialGrid::new(3, 0.0, 1.0).unwrap();
        let h1 = KineticOperator::finite_difference(g).dense().unwrap().clone();
        let h2 = PotentialOperator::from_values(g, vec![1.0, 2.0, 4.0]).unwrap().dense().unwrap();
        (h1, h2)
    }

    #[test]
    fn commutator_examples() {
        let (h1, h2) = small_example_n3();
        assert_eq!(commutator(&h2, &h2).unwrap().norm(), 0.0);
        let expected = real(3, &[0.0, -1.0, -3.0, 1.0, 0.0, -2.0, 3.0, 2.0, 0.0]) * Complex64::new(9.0, 0.0);
        assert_abs_diff_eq!((commutator(&h1, &h2).unwrap() - expected).norm(), 0.0, epsilon = 1e-12);
        assert!(commutator(&h1, &CMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn operator_norm_examples() {
        let g = SpatialGrid::new(4, 0.0, 1.0).unwrap();
        let h1 = KineticOperator::finite_difference(g).dense().unwrap().clone();
        assert_relative_eq!(operator_norm(&h1, 1e-8).unwrap(), 64.0, max_relative = 1e-7);
        assert_eq!(operator_norm(&CMatrix::zeros(4, 4), 1e-8).unwrap(), 0.0);
        let d = real(4, &[2.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_relative_eq!(operator_norm(&d, 1e-8).unwrap(), 2.0, max_relative = 1e-7);
        assert_relative_eq!(operator_norm_exact(&d), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn one_inf_examples() {
        let g = SpatialGrid::new(4, 0.0, 1.0).unwrap();
        let h1 = KineticOperator::finite_difference(g).dense().unwrap().clone();
        assert_abs_diff_eq!(one_inf_norm_bound(&h1), 64.0, epsilon = 1e-12);
        assert_abs_diff_eq!(one_inf_norm_bound(&CMatrix::identity(5, 5)), 1.0, epsilon = 1e-15);
        let (h1, h2) = small_example_n3();
        let c = commutator(&h1, &h2).unwrap();
        // column sums 36, 27, 45; row sums 36, 27, 45
        assert_abs_diff_eq!(one_inf_norm_bound(&c), 45.0, epsilon = 1e-12);
        assert!(operator_norm_exact(&c) <= 45.0);
    }

    #[test]
    fn power_iteration_agrees_with_svd_on_clustered_spectrum() {
        let g = SpatialGrid::symmetric_2pi(64).unwrap();
        let k = KineticOperator::finite_difference(g);
        let p = PotentialOperator::build(crate::discretization::Potential::one_minus_cos(), g).unwrap();
        let c = commutator(k.dense().unwrap(), &p.dense().unwrap()).unwrap();
        let exact = operator_norm_exact(&c);
        let power = operator_norm(&c, 1e-8).unwrap();
        assert!(power <= exact * (1.0 + 1e-12));
        assert_relative_eq!(power, exact, max_relative = 1e-3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn one_inf_dominates_operator_norm(entries in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 25)) {
            let m = CMatrix::from_iterator(5, 5, entries.iter().map(|&(a, b)| Complex64::new(a, b)));
            let exact = operator_norm_exact(&m);
            prop_assert!(one_inf_norm_bound(&m) >= exact * (1.0 - 1e-12));
            let power = operator_norm(&m, 1e-10).unwrap();
            prop_assert!(power <= exact * (1.0 + 1e-10));
        }
    }
}
