use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{check_dense_cap, CMatrix, SpatialGrid, StateVector};
use crate::error::{Error, Result};

/// A potential `V(x)`, declared `C⁴` (not checked).
#[derive(Clone)]
pub struct Potential {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    smoothness: usize,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential").field("name", &self.name).field("smoothness", &self.smoothness).finish()
    }
}

impl Potential {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { name: name.into(), f: Arc::new(f), smoothness: 4 }
    }

    pub fn with_smoothness(mut self, smoothness: usize) -> Self {
        self.smoothness = smoothness;
        self
    }

    /// `V(x) = 1 - cos x`.
    pub fn one_minus_cos() -> Self {
        Self::new("one-minus-cos", |x: f64| 1.0 - x.cos()).with_smoothness(usize::MAX)
    }

    pub fn constant(c: f64) -> Self {
        Self::new("constant", move |_| c).with_smoothness(usize::MAX)
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// Random trigonometric polynomial, periodic on `[x_lo, x_hi)`, with
    /// `modes` Fourier modes whose amplitudes decay like `1/k²`.
    pub fn random_trigonometric(seed: u64, modes: usize, x_lo: f64, x_hi: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<(f64, f64)> = (1..=modes)
            .map(|k| {
                let scale = 1.0 / (k * k) as f64;
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                (a * scale, b * scale)
            })
            .collect();
        let offset: f64 = StandardNormal.sample(&mut rng);
        let omega = 2.0 * PI / (x_hi - x_lo);
        Self::new(format!("random-trig-{seed}"), move |x| {
            let y = omega * (x - x_lo);
            offset
                + coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, (a, b))| {
                        let (s, c) = ((i + 1) as f64 * y).sin_cos();
                        a * c + b * s
                    })
                    .sum::<f64>()
        })
        .with_smoothness(usize::MAX)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn smoothness(&self) -> usize {
        self.smoothness
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

/// Diagonal potential operator `H2 = diag(V(x_k))`.
#[derive(Debug, Clone)]
pub struct PotentialOperator {
    grid: SpatialGrid,
    potential: Potential,
    values: Vec<f64>,
}

impl PotentialOperator {
    pub fn build(potential: Potential, grid: SpatialGrid) -> Result<Self> {
        let values: Vec<f64> = grid.nodes().into_iter().map(|x| potential.eval(x)).collect();
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::construction(format!(
                "potential '{}' is not finite at x = {}",
                potential.name(),
                grid.node(k)
            )));
        }
        Ok(Self { grid, potential, values })
    }

    /// Operator with the given node values.
    pub fn from_values(grid: SpatialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::DimensionMismatch(format!("{} values for {} nodes", values.len(), grid.n())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::construction("non-finite potential value"));
        }
        let table = values.clone();
        let lo = grid.x_lo();
        let dx = grid.spacing();
        let n = grid.n();
        let potential = Potential::new("tabulated", move |x| {
            let k = ((x - lo) / dx).round().rem_euclid(n as f64) as usize;
            table[k]
        })
        .with_smoothness(0);
        Ok(Self { grid, potential, values })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Operator norm `max_k |v_k|`.
    pub fn norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn check_grid(&self, grid: &SpatialGrid) -> Result<()> {
        if grid != &self.grid {
            return Err(Error::GridMismatch(format!("state on {grid:?}, operator on {:?}", self.grid)));
        }
        Ok(())
    }

    /// Phases `e^{-iθ v_k}`.
    pub fn phase_table(&self, theta: f64) -> Vec<Complex64> {
        self.values
            .iter()
            .map(|v| {
                let (s, c) = (theta * v).sin_cos();
                Complex64::new(c, -s)
            })
            .collect()
    }

    /// Applies `exp(-iθH2)` in place to each length-`n` column of `data`.
    pub fn apply_exp_in_place(&self, theta: f64, data: &mut [Complex64]) {
        if theta == 0.0 {
            return;
        }
        let table = self.phase_table(theta);
        for chunk in data.chunks_exact_mut(table.len()) {
            for (z, p) in chunk.iter_mut().zip(&table) {
                *z *= p;
            }
        }
    }

    pub fn apply_exp(&self, theta: f64, psi: &StateVector) -> Result<StateVector> {
        self.check_grid(psi.grid())?;
        let mut out = psi.clone();
        self.apply_exp_in_place(theta, out.amplitudes_mut());
        Ok(out)
    }

    /// `H2 ψ`.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.check_grid(psi.grid())?;
        let mut out = psi.clone();
        for (z, v) in out.amplitudes_mut().iter_mut().zip(&self.values) {
            *z *= v;
        }
        Ok(out)
    }

    pub fn dense(&self) -> Result<CMatrix> {
        check_dense_cap(self.grid.n())?;
        let n = self.grid.n();
        Ok(CMatrix::from_fn(n, n, |j, k| if j == k { Complex64::new(self.values[j], 0.0) } else { Complex64::new(0.0, 0.0) }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn one_minus_cos_on_four_nodes() {
        let p = PotentialOperator::build(Potential::one_minus_cos(), SpatialGrid::symmetric_2pi(4).unwrap()).unwrap();
        for (v, e) in p.values().iter().zip([2.0, 1.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*v, e, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(p.norm(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_and_constant() {
        let g = SpatialGrid::new(5, 0.0, 1.0).unwrap();
        let z = PotentialOperator::build(Potential::zero(), g).unwrap();
        assert!(z.dense().unwrap().iter().all(|c| c.norm() == 0.0));
        let c = PotentialOperator::build(Potential::constant(3.0), g).unwrap();
        let d = c.dense().unwrap();
        assert_eq!(d, CMatrix::identity(5, 5) * Complex64::new(3.0, 0.0));
    }

    #[test]
    fn non_finite_potential_rejected() {
        let g = SpatialGrid::new(4, 0.0, 1.0).unwrap();
        assert!(PotentialOperator::build(Potential::new("bad", |x: f64| 1.0 / x), g).is_err());
    }

    #[test]
    fn exp_examples() {
        let g = SpatialGrid::symmetric_2pi(4).unwrap();
        let p = PotentialOperator::build(Potential::one_minus_cos(), g).unwrap();
        let ones = StateVector::constant(g, Complex64::new(1.0, 0.0));
        let out = p.apply_exp(PI, &ones).unwrap();
        for (z, e) in out.amplitudes().iter().zip([1.0, -1.0, 1.0, -1.0]) {
            assert_abs_diff_eq!(z.re, e, epsilon = 1e-14);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-14);
        }
        assert_eq!(p.apply_exp(0.0, &ones).unwrap(), ones);
        let c = PotentialOperator::build(Potential::constant(0.7), g).unwrap();
        let out = c.apply_exp(1.3, &ones).unwrap();
        let phase = Complex64::from_polar(1.0, -1.3 * 0.7);
        for z in out.amplitudes() {
            assert_abs_diff_eq!((z - phase).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn random_potentials_are_periodic_and_seeded() {
        let a = Potential::random_trigonometric(7, 5, -PI, PI);
        let b = Potential::random_trigonometric(7, 5, -PI, PI);
        assert_eq!(a.eval(0.3), b.eval(0.3));
        assert_abs_diff_eq!(a.eval(-PI), a.eval(PI), epsilon = 1e-12);
        assert_ne!(a.eval(0.3), Potential::random_trigonometric(8, 5, -PI, PI).eval(0.3));
    }

    #[test]
    fn tabulated_potential() {
        let g = SpatialGrid::new(4, 0.0, 1.0).unwrap();
        let p = PotentialOperator::from_values(g, vec![1.0, 2.0, 4.0, 8.0]).unwrap();
        assert_eq!(p.potential().eval(0.5), 4.0);
        assert!(PotentialOperator::from_values(g, vec![1.0]).is_err());
    }
}
