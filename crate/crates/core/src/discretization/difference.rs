use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kinetic::{fft_frequencies, FftPlans};
use super::{check_dense_cap, circulant_from_symbol, CMatrix, SpatialGrid, StateVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DifferenceKind {
    /// Cyclic first difference `s (v_{k-1} - v_k)`; its Gram matrix is the FD Laplacian.
    FirstDifference,
    /// Fourier derivative with symbol `i k`; its Gram matrix is the spectral Laplacian.
    SpectralDerivative,
}

/// First-order factor `D1` with `D1† D1 = H1`.
#[derive(Clone)]
pub struct DifferenceOperator {
    grid: SpatialGrid,
    kind: DifferenceKind,
    symbol: Vec<Complex64>,
    plans: FftPlans,
}

impl std::fmt::Debug for DifferenceOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DifferenceOperator").field("grid", &self.grid).field("kind", &self.kind).finish()
    }
}

impl DifferenceOperator {
    /// Cyclic first-difference matrix scaled by `s = n / length`.
    pub fn first_difference(grid: SpatialGrid) -> Self {
        let n = grid.n();
        let s = grid.scale();
        // (Dv)_k = s (v_{k-1} - v_k) has symbol s (e^{-2πij/n} - 1)
        let symbol = (0..n)
            .map(|j| (Complex64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64) - 1.0) * s)
            .collect();
        Self { grid, kind: DifferenceKind::FirstDifference, symbol, plans: FftPlans::new(n) }
    }

    /// Fourier derivative, even `n`.
    pub fn spectral_derivative(grid: SpatialGrid) -> Result<Self> {
        let n = grid.n();
        if n % 2 != 0 {
            return Err(Error::construction(format!("spectral derivative needs even n, got {n}")));
        }
        let symbol = fft_frequencies(n)
            .into_iter()
            .map(|m| Complex64::new(0.0, 2.0 * PI * m as f64 / grid.length()))
            .collect();
        Ok(Self { grid, kind: DifferenceKind::SpectralDerivative, symbol, plans: FftPlans::new(n) })
    }

    /// The factor matching a kinetic discretization.
    pub fn for_kinetic(grid: SpatialGrid, kind: super::KineticDiscretization) -> Result<Self> {
        match kind {
            super::KineticDiscretization::FiniteDifference => Ok(Self::first_difference(grid)),
            super::KineticDiscretization::FourierSpectral => Self::spectral_derivative(grid),
        }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    /// Operator norm, the largest symbol modulus (the operator is circulant).
    pub fn norm(&self) -> f64 {
        self.symbol.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn kind(&self) -> DifferenceKind {
        self.kind
    }

    /// `D1 ψ`.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.grid() != &self.grid {
            return Err(Error::GridMismatch(format!("state on {:?}, operator on {:?}", psi.grid(), self.grid)));
        }
        let mut out = psi.clone();
        match self.kind {
            DifferenceKind::FirstDifference => {
                let s = self.grid.scale();
                let v = psi.amplitudes();
                let n = v.len();
                for (k, z) in out.amplitudes_mut().iter_mut().enumerate() {
                    *z = (v[(k + n - 1) % n] - v[k]) * s;
                }
            }
            DifferenceKind::SpectralDerivative => {
                let inv_n = 1.0 / self.grid.n() as f64;
                let multiplier: Vec<Complex64> = self.symbol.iter().map(|z| z * inv_n).collect();
                let mut scratch = Vec::new();
                self.plans.apply_multiplier(&multiplier, out.amplitudes_mut(), &mut scratch);
            }
        }
        Ok(out)
    }

    pub fn dense(&self) -> Result<CMatrix> {
        check_dense_cap(self.grid.n())?;
        match self.kind {
            DifferenceKind::FirstDifference => {
                let n = self.grid.n();
                let s = self.grid.scale();
                let mut m = CMatrix::zeros(n, n);
                for k in 0..n {
                    m[(k, k)] += Complex64::new(-s, 0.0);
                    m[(k, (k + n - 1) % n)] += Complex64::new(s, 0.0);
                }
                Ok(m)
            }
            DifferenceKind::SpectralDerivative => circulant_from_symbol(&self.symbol),
        }
    }
}
