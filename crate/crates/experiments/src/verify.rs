use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use trotter_core::analysis::commutators::{fd_double_kinetic_commutator, fd_kinetic_potential_commutator};
use trotter_core::analysis::{commutator, estimate_operator_norm, local_operator_bound, local_preconstants, OperatorNorms};
use trotter_core::controls::ControlPreset;
use trotter_core::discretization::{
    CMatrix, DifferenceOperator, KineticDiscretization, KineticOperator, Potential, PotentialOperator, SpatialGrid,
    StateVector,
};
use trotter_core::propagators::{dense_propagator, unitarity_defect, Propagator, Scheme};

use crate::error::Result;

/// Outcome of one invariant check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst measured value.
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckResult {
    fn at_most(name: &str, value: f64, threshold: f64, detail: String) -> Self {
        Self { name: name.into(), passed: value <= threshold, value, threshold, detail }
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn kinds() -> [KineticDiscretization; 2] {
    [KineticDiscretization::FiniteDifference, KineticDiscretization::FourierSpectral]
}

/// Worst `‖U†U - I‖_F / √n` over all schemes, both discretizations, n = 64, L = 10.
pub fn check_unitarity() -> Result<CheckResult> {
    let pair = ControlPreset::OscillatingMass { a: 10.0 }.build(1e-3)?;
    let mut worst = 0.0f64;
    for kind in kinds() {
        let g = SpatialGrid::symmetric_2pi(64)?;
        let k = KineticOperator::build(g, kind)?;
        let p = PotentialOperator::build(Potential::one_minus_cos(), g)?;
        for s in Scheme::ALL {
            worst = worst.max(unitarity_defect(&dense_propagator(s, &pair, &k, &p, 1e-3, 10)?));
        }
    }
    Ok(CheckResult::at_most("unitarity", worst, 1e-9, "dense propagators, n=64, L=10".into()))
}

/// Entrywise `D1† D1` against `H1`, relative to the largest entry of `H1`.
pub fn check_difference_factorization() -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for n in [3, 4, 16, 256] {
        let g = SpatialGrid::symmetric_2pi(n)?;
        for kind in kinds() {
            if kind == KineticDiscretization::FourierSpectral && n % 2 == 1 {
                continue;
            }
            let d = DifferenceOperator::for_kinetic(g, kind)?.dense()?;
            let h = KineticOperator::build(g, kind)?;
            let h = h.dense()?;
            worst = worst.max(max_abs(&(d.adjoint() * &d - h)) / max_abs(h));
        }
    }
    Ok(CheckResult::at_most("difference-factorization", worst, 1e-12, "n in {3,4,16,256}".into()))
}

/// FFT-applied `exp(-iθH1)` against a dense Hermitian eigendecomposition.
pub fn check_fft_exponential() -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for n in [8, 16, 64] {
        let g = SpatialGrid::symmetric_2pi(n)?;
        for kind in kinds() {
            let k = KineticOperator::build(g, kind)?;
            let theta = 0.7 / k.norm();
            let eig = k.dense()?.clone().symmetric_eigen();
            let phases = eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -theta * l));
            let oracle = &eig.eigenvectors * CMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint();
            for j in 0..n {
                let col = k.apply_exp(theta, &StateVector::basis(g, j))?;
                let gap = col.amplitudes().iter().zip(oracle.column(j).iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                worst = worst.max(gap);
            }
        }
    }
    Ok(CheckResult::at_most("fft-exponential", worst, 1e-10, "n in {8,16,64}, both discretizations".into()))
}

/// Finite-difference closed forms of `[H1,H2]` and `[H1,[H1,H2]]` against dense products.
pub fn check_commutator_closed_forms(seed: u64) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for n in [4, 8, 16] {
        let g = SpatialGrid::symmetric_2pi(n)?;
        let h1 = KineticOperator::finite_difference(g);
        let h1 = h1.dense()?;
        for r in 0..3 {
            let v = Potential::random_trigonometric(seed.wrapping_add(r), 4, g.x_lo(), g.x_hi());
            let p = PotentialOperator::build(v, g)?;
            let c12 = commutator(h1, &p.dense()?)?;
            let c112 = commutator(h1, &c12)?;
            let closed12 = fd_kinetic_potential_commutator(&g, p.values())?;
            let closed112 = fd_double_kinetic_commutator(&g, p.values())?;
            worst = worst.max(max_abs(&(closed12 - &c12)) / max_abs(&c12).max(f64::MIN_POSITIVE));
            worst = worst.max(max_abs(&(closed112 - &c112)) / max_abs(&c112).max(f64::MIN_POSITIVE));
        }
    }
    Ok(CheckResult::at_most("commutator-closed-forms", worst, 1e-9, "n in {4,8,16}, 3 random potentials".into()))
}

/// Reference tolerance of the local-bound check; one-step errors there are at least 1e-9.
pub const LOCAL_BOUND_REFERENCE_TOL: f64 = 1e-12;

/// Largest ratio of measured one-step operator error to the evaluated local bound.
pub fn check_local_bounds(ns: &[usize], hs: &[f64], a_values: &[f64]) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    let mut at = String::new();
    for &n in ns {
        let g = SpatialGrid::symmetric_2pi(n)?;
        let k = KineticOperator::finite_difference(g);
        let p = PotentialOperator::build(Potential::one_minus_cos(), g)?;
        let ops = OperatorNorms::compute(&k, &p)?;
        for &a in a_values {
            for &h in hs {
                let pair = ControlPreset::OscillatingMass { a }.build(h)?;
                let norms = pair.norms(h)?;
                let prop = Propagator::new(&pair, &k, &p)?;
                let exact = prop.dense_reference(0.0, h, LOCAL_BOUND_REFERENCE_TOL)?.matrix;
                for s in Scheme::ALL {
                    let err = estimate_operator_norm(&(prop.dense_propagator(s, 0.0, h, 1)? - &exact))?;
                    let bound = local_operator_bound(&local_preconstants(s, &norms, &ops)?, h);
                    if err / bound > worst {
                        worst = err / bound;
                        at = format!("{s}, n={n}, a={a}, h={h:e}: error {err:.3e}, bound {bound:.3e}");
                    }
                }
            }
        }
    }
    Ok(CheckResult::at_most("local-bound-validity", worst, 1.0, format!("worst ratio at {at}")))
}

/// The invariant suite run by `trotter verify`.
pub fn run_verification(seed: u64) -> Result<Vec<CheckResult>> {
    Ok(vec![
        check_unitarity()?,
        check_difference_factorization()?,
        check_fft_exponential()?,
        check_commutator_closed_forms(seed)?,
        check_local_bounds(&[16], &[1e-3, 1e-4], &[1.0, 10.0])?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_defaults() {
        for c in run_verification(7).unwrap() {
            assert!(c.passed, "{c:?}");
        }
    }
}
