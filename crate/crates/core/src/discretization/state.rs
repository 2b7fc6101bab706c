use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::SpatialGrid;
use crate::error::{Error, Result};

/// Complex amplitudes on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    grid: SpatialGrid,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(grid: SpatialGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.n() {
            return Err(Error::DimensionMismatch(format!("{} amplitudes for {} nodes", amplitudes.len(), grid.n())));
        }
        if amplitudes.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("state amplitude".into()));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn zeros(grid: SpatialGrid) -> Self {
        Self::constant(grid, Complex64::new(0.0, 0.0))
    }

    pub fn constant(grid: SpatialGrid, value: Complex64) -> Self {
        Self { grid, amplitudes: vec![value; grid.n()] }
    }

    /// Unit vector `e_j`.
    pub fn basis(grid: SpatialGrid, j: usize) -> Self {
        let mut s = Self::zeros(grid);
        s.amplitudes[j] = Complex64::new(1.0, 0.0);
        s
    }

    /// `ψ_k = g(x_k)`.
    pub fn sample_function<G: Fn(f64) -> f64>(g: G, grid: SpatialGrid) -> Result<Self> {
        Self::sample_complex(|x| Complex64::new(g(x), 0.0), grid)
    }

    pub fn sample_complex<G: Fn(f64) -> Complex64>(g: G, grid: SpatialGrid) -> Result<Self> {
        let amplitudes: Vec<Complex64> = grid.nodes().into_iter().map(g).collect();
        if let Some(k) = amplitudes.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(format!("sample at x = {}", grid.node(k))));
        }
        Ok(Self { grid, amplitudes })
    }

    /// Gaussian random vector normalized to `‖ψ‖ = 1`.
    pub fn random_unit<R: Rng + ?Sized>(grid: SpatialGrid, rng: &mut R) -> Self {
        let amplitudes: Vec<Complex64> = (0..grid.n())
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let mut s = Self { grid, amplitudes };
        let norm = s.norm2();
        s.scale_mut(1.0 / norm);
        s
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Euclidean norm.
    pub fn norm2(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖ψ‖⋆ = ‖ψ‖ / √n`.
    pub fn rescaled_norm(&self) -> f64 {
        self.norm2() / (self.n() as f64).sqrt()
    }

    pub fn scale_mut(&mut self, factor: f64) {
        self.amplitudes.iter_mut().for_each(|z| *z *= factor);
    }

    /// `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let amplitudes = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid, amplitudes })
    }

    /// `‖self - other‖`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
    }

    /// `⟨self, other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_grid(other)?;
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn conj(&self) -> Self {
        Self { grid: self.grid, amplitudes: self.amplitudes.iter().map(|z| z.conj()).collect() }
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sample_and_norm_examples() {
        let g = SpatialGrid::symmetric_2pi(4).unwrap();
        let c = StateVector::sample_function(f64::cos, g).unwrap();
        for (z, e) in c.amplitudes().iter().zip([-1.0, 0.0, 1.0, 0.0]) {
            assert_abs_diff_eq!(z.re, e, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(c.rescaled_norm(), 0.5f64.sqrt(), epsilon = 1e-15);
        let ones = StateVector::sample_function(|_| 1.0, g).unwrap();
        assert_abs_diff_eq!(ones.rescaled_norm(), 1.0, epsilon = 1e-15);
        assert_eq!(StateVector::zeros(g).rescaled_norm(), 0.0);
        assert!(StateVector::sample_function(|x| 1.0 / (x + std::f64::consts::PI), g).is_err());
    }

    #[test]
    fn pythagorean_pattern() {
        // grids need n >= 3, so the (3, 4) pattern is zero-padded
        let g = SpatialGrid::new(4, 0.0, 1.0).unwrap();
        let v = StateVector::new(g, [3.0, 4.0, 0.0, 0.0].map(|x| Complex64::new(x, 0.0)).to_vec()).unwrap();
        assert_abs_diff_eq!(v.norm2(), 5.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.rescaled_norm(), 2.5, epsilon = 1e-15);
    }

    #[test]
    fn random_unit_vectors() {
        let g = SpatialGrid::new(32, 0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = StateVector::random_unit(g, &mut rng);
        assert_abs_diff_eq!(v.norm2(), 1.0, epsilon = 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(v, StateVector::random_unit(g, &mut rng));
    }

    #[test]
    fn grid_mismatch() {
        let a = StateVector::zeros(SpatialGrid::new(4, 0.0, 1.0).unwrap());
        let b = StateVector::zeros(SpatialGrid::new(4, 0.0, 2.0).unwrap());
        assert!(matches!(a.sub(&b), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn rescaled_norm_converges_to_l2_average() {
        // mean of g² over the period for g = e^{sin x}: I0(2)
        let exact = 2.2795853023360673;
        let mut prev = f64::INFINITY;
        for n in [4usize, 8, 16] {
            let g = SpatialGrid::symmetric_2pi(n).unwrap();
            let v = StateVector::sample_function(|x| x.sin().exp(), g).unwrap();
            let err = (v.rescaled_norm().powi(2) - exact).abs();
            assert!(err <= prev.max(1e-13));
            prev = err;
        }
        // periodic bump with limited smoothness: at least second-order convergence
        let bump = |x: f64| (std::f64::consts::PI * x).sin().powi(2);
        let errs: Vec<f64> = [16usize, 32, 64]
            .iter()
            .map(|&n| {
                let g = SpatialGrid::new(n, 0.0, 1.0).unwrap();
                let v = StateVector::sample_function(|x| bump(x) * (1.0 + x * (1.0 - x)), g).unwrap();
                let exact = crate::numerics::integrate_adaptive(|x| (bump(x) * (1.0 + x * (1.0 - x))).powi(2), 0.0, 1.0, 1e-14).unwrap();
                (v.rescaled_norm().powi(2) - exact).abs()
            })
            .collect();
        assert!(errs[1] <= errs[0] / 3.5 && errs[2] <= errs[1] / 3.5, "{errs:?}");
    }

    proptest! {
        #[test]
        fn rescaled_norm_identity(values in proptest::collection::vec(-10.0f64..10.0, 3..40)) {
            let n = values.len();
            let g = SpatialGrid::new(n, 0.0, 1.0).unwrap();
            let v = StateVector::new(g, values.iter().map(|&x| Complex64::new(x, -0.5 * x)).collect()).unwrap();
            prop_assert!((v.rescaled_norm() * (n as f64).sqrt() - v.norm2()).abs() <= 1e-12 * v.norm2().max(1.0));
        }
    }
}
