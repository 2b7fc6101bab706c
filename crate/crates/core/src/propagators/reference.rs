use num_complex::Complex64;
use serde::Serialize;

use super::{identity_columns, Propagator, Scheme};
use crate::analysis::one_inf_norm_bound;
use crate::discretization::{check_dense_cap, CMatrix, StateVector};
use crate::error::{Error, Result};

/// Step count of the first reference run.
pub const REFERENCE_START_STEPS: usize = 64;
/// Largest step count tried before giving up.
pub const MAX_REFERENCE_STEPS: usize = 1 << 24;
/// Smallest accepted reference tolerance.
pub const MIN_REFERENCE_TOL: f64 = 1e-13;
/// Doublings without a new smallest difference after which the search stops:
/// the differences are then dominated by accumulated roundoff.
const STAGNATION_LIMIT: usize = 3;

/// One doubling of the reference search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoublingStep {
    pub steps: usize,
    /// Difference between the plain runs with `steps` and `steps / 2`.
    pub raw: f64,
    /// Difference between successive extrapolated results, once two exist.
    pub extrapolated: Option<f64>,
}

/// Self-converged reference state.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub state: StateVector,
    /// Steps of the finest run.
    pub steps: usize,
    /// Rescaled-norm difference between the last two extrapolated results.
    pub last_difference: f64,
    pub history: Vec<DoublingStep>,
}

/// Self-converged dense reference propagator.
#[derive(Debug, Clone)]
pub struct DenseReference {
    pub matrix: CMatrix,
    pub steps: usize,
    /// `√(‖ΔU‖₁ ‖ΔU‖∞)` between the last two extrapolated results, an upper
    /// bound on the operator-norm change.
    pub last_difference: f64,
    pub history: Vec<DoublingStep>,
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol >= MIN_REFERENCE_TOL) {
        return Err(Error::invalid(format!("reference tolerance must be at least {MIN_REFERENCE_TOL:e}, got {tol:e}")));
    }
    Ok(())
}

/// `(4 fine - coarse) / 3`: the second-order scheme is symmetric, so its error
/// expands in even powers of the step and this cancels the leading term.
fn extrapolate(fine: &[Complex64], coarse: &[Complex64]) -> Vec<Complex64> {
    fine.iter().zip(coarse).map(|(f, c)| (f * 4.0 - c) / 3.0).collect()
}

/// Doubles the step count from [`REFERENCE_START_STEPS`], extrapolating each
/// pair of successive runs, until two extrapolated results differ by at most
/// `tol / 10` under `distance`. If the differences stop improving first, the
/// best extrapolated result is accepted when its difference is within `tol`.
fn converge<R, D>(tol: f64, what: &str, run: R, distance: D) -> Result<(Vec<Complex64>, usize, f64, Vec<DoublingStep>)>
where
    R: Fn(usize) -> Result<Vec<Complex64>>,
    D: Fn(&[Complex64], &[Complex64]) -> f64,
{
    check_tol(tol)?;
    let mut steps = REFERENCE_START_STEPS;
    let mut coarse = run(steps)?;
    let mut previous: Option<Vec<Complex64>> = None;
    let mut history: Vec<DoublingStep> = Vec::new();
    // (result, steps, difference) with the smallest difference so far
    let mut best: Option<(Vec<Complex64>, usize, f64)> = None;
    while steps < MAX_REFERENCE_STEPS {
        steps *= 2;
        let fine = run(steps)?;
        let raw = distance(&fine, &coarse);
        let current = extrapolate(&fine, &coarse);
        let extrapolated = previous.as_ref().map(|p| distance(&current, p));
        history.push(DoublingStep { steps, raw, extrapolated });
        if let Some(d) = extrapolated {
            if d <= tol / 10.0 {
                return Ok((current, steps, d, history));
            }
            if best.as_ref().map_or(true, |b| d < b.2) {
                best = Some((current.clone(), steps, d));
            }
            if stagnated(&history) {
                break;
            }
        }
        previous = Some(current);
        coarse = fine;
    }
    match best {
        Some((result, at, d)) if d <= tol => Ok((result, at, d, history)),
        best => Err(Error::Accuracy {
            what: format!("{what} did not reach tolerance {tol:e} within {steps} steps"),
            achieved: best.map_or(f64::INFINITY, |b| b.2),
        }),
    }
}

/// True once the last [`STAGNATION_LIMIT`] extrapolated differences all fail
/// to improve on the smallest one before them.
fn stagnated(history: &[DoublingStep]) -> bool {
    let d: Vec<f64> = history.iter().filter_map(|h| h.extrapolated).collect();
    if d.len() <= STAGNATION_LIMIT {
        return false;
    }
    let (earlier, recent) = d.split_at(d.len() - STAGNATION_LIMIT);
    let best = earlier.iter().cloned().fold(f64::INFINITY, f64::min);
    recent.iter().all(|&x| x >= best)
}

impl Propagator<'_> {
    /// Extrapolated second-order generalized steps, doubled from
    /// [`REFERENCE_START_STEPS`] until successive results differ by at most
    /// `tol / 10` in the rescaled norm.
    pub fn reference(&self, psi0: &StateVector, t0: f64, t1: f64, tol: f64) -> Result<ReferenceSolution> {
        let grid = *psi0.grid();
        let n = psi0.n() as f64;
        let run = |steps| Ok(self.evolve_state(Scheme::G2, psi0, t0, t1, steps)?.into_amplitudes());
        let distance =
            |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt() / n.sqrt();
        let (amps, steps, last_difference, history) = converge(tol, "reference evolution", run, distance)?;
        Ok(ReferenceSolution { state: StateVector::new(grid, amps)?, steps, last_difference, history })
    }

    /// Dense analogue of [`reference`](Self::reference); convergence is measured by
    /// `√(‖ΔU‖₁ ‖ΔU‖∞)`.
    pub fn dense_reference(&self, t0: f64, t1: f64, tol: f64) -> Result<DenseReference> {
        let n = self.n();
        check_dense_cap(n)?;
        let run = |steps| {
            let mut data = identity_columns(n);
            self.evolve_columns(Scheme::G2, &mut data, t0, t1, steps)?;
            Ok(data)
        };
        let distance = |a: &[Complex64], b: &[Complex64]| {
            let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            one_inf_norm_bound(&CMatrix::from_vec(n, n, diff))
        };
        let (data, steps, last_difference, history) = converge(tol, "dense reference", run, distance)?;
        Ok(DenseReference { matrix: CMatrix::from_vec(n, n, data), steps, last_difference, history })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stagnation_needs_no_new_minimum() {
        let h = |d: &[f64]| {
            d.iter().enumerate().map(|(i, &x)| DoublingStep { steps: 128 << i, raw: 1.0, extrapolated: Some(x) }).collect::<Vec<_>>()
        };
        assert!(!stagnated(&h(&[1e-3, 1e-4, 1e-5])));
        assert!(!stagnated(&h(&[1e-3, 1e-4, 2e-4, 3e-4])));
        assert!(stagnated(&h(&[1e-3, 1e-13, 2e-13, 3e-13, 5e-13])));
        assert!(stagnated(&h(&[1e-3, 1e-13, 2e-13, 1e-13, 5e-13])));
        assert!(!stagnated(&h(&[1e-3, 1e-13, 2e-13, 9e-14, 5e-13])));
    }

    #[test]
    fn stagnated_search_accepts_best_within_tolerance() {
        // exact + c / L^2 plus roundoff-like noise alternating with the doubling
        let run = |steps: usize| {
            let noise = if steps.trailing_zeros() % 2 == 0 { 6e-13 } else { -6e-13 };
            Ok(vec![Complex64::new(1.0 + 3.0 / (steps * steps) as f64 + noise, 0.0)])
        };
        let distance = |a: &[Complex64], b: &[Complex64]| (a[0] - b[0]).norm();
        let (result, steps, d, history) = converge(1e-11, "test", run, distance).unwrap();
        assert!(d > 1e-12 && d <= 1e-11);
        assert!((result[0].re - 1.0).abs() < 2e-12);
        assert!(steps < history.last().unwrap().steps);
        assert!(matches!(converge(1e-12, "test", run, distance), Err(Error::Accuracy { .. })));
    }

    #[test]
    fn extrapolation_cancels_quadratic_term() {
        // values e + c h^2 with h halving
        let exact = Complex64::new(0.3, -0.2);
        let c = Complex64::new(5.0, 1.0);
        let coarse = [exact + c * 0.01];
        let fine = [exact + c * 0.0025];
        assert!((extrapolate(&fine, &coarse)[0] - exact).norm() < 1e-15);
    }
}
