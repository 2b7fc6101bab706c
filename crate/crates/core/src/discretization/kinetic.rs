use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{check_dense_cap, circulant_from_symbol, CMatrix, SpatialGrid, StateVector};
use crate::error::{Error, Result};

/// How `-Δ` is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KineticDiscretization {
    /// Three-point central difference, periodic.
    #[serde(alias = "fd")]
    FiniteDifference,
    /// Fourier collocation with symbol `k²`.
    #[serde(alias = "spectral", alias = "fourier")]
    FourierSpectral,
}

impl KineticDiscretization {
    pub fn id(&self) -> &'static str {
        match self {
            Self::FiniteDifference => "fd",
            Self::FourierSpectral => "spectral",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fd" | "finite-difference" => Ok(Self::FiniteDifference),
            "spectral" | "fourier-spectral" | "fourier" => Ok(Self::FourierSpectral),
            other => Err(Error::invalid(format!("unknown discretization '{other}' (expected fd or spectral)"))),
        }
    }
}

/// Forward/inverse FFT plans of a fixed length.
#[derive(Clone)]
pub(crate) struct FftPlans {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
}

impl FftPlans {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn scratch_len(&self) -> usize {
        self.forward.get_inplace_scratch_len().max(self.inverse.get_inplace_scratch_len())
    }

    /// Applies `v ↦ ifft(multiplier ⊙ fft(v))` to every length-`n` chunk of `data`.
    /// The `1/n` normalization must already be folded into `multiplier`.
    pub fn apply_multiplier(&self, multiplier: &[Complex64], data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let n = multiplier.len();
        debug_assert_eq!(data.len() % n, 0);
        let need = self.scratch_len();
        if scratch.len() < need {
            scratch.resize(need, Complex64::new(0.0, 0.0));
        }
        self.forward.process_with_scratch(data, &mut scratch[..need]);
        for chunk in data.chunks_exact_mut(n) {
            for (z, m) in chunk.iter_mut().zip(multiplier) {
                *z *= m;
            }
        }
        self.inverse.process_with_scratch(data, &mut scratch[..need]);
    }
}

/// Discretized kinetic operator `H1 ≈ -Δ`, diagonalized by the discrete Fourier transform.
#[derive(Clone)]
pub struct KineticOperator {
    grid: SpatialGrid,
    kind: KineticDiscretization,
    eigenvalues: Vec<f64>,
    plans: FftPlans,
    dense: OnceLock<CMatrix>,
}

impl fmt::Debug for KineticOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KineticOperator")
            .field("grid", &self.grid)
            .field("kind", &self.kind)
            .field("norm", &self.norm())
            .finish()
    }
}

impl KineticOperator {
    /// Periodic three-point Laplacian: diagonal `2s²`, neighbours and corners `-s²`.
    pub fn finite_difference(grid: SpatialGrid) -> Self {
        let n = grid.n();
        let s2 = grid.scale().powi(2);
        let eigenvalues = (0..n).map(|j| 2.0 * s2 * (1.0 - (2.0 * PI * j as f64 / n as f64).cos())).collect();
        Self::from_parts(grid, KineticDiscretization::FiniteDifference, eigenvalues)
    }

    /// Fourier collocation: eigenvalues `(2π m_j / length)²`, `m_j` the FFT frequency of index `j`.
    pub fn spectral(grid: SpatialGrid) -> Result<Self> {
        let n = grid.n();
        if n % 2 != 0 {
            return Err(Error::construction(format!("spectral discretization needs even n, got {n}")));
        }
        let eigenvalues = fft_frequencies(n)
            .into_iter()
            .map(|m| (2.0 * PI * m as f64 / grid.length()).powi(2))
            .collect();
        Ok(Self::from_parts(grid, KineticDiscretization::FourierSpectral, eigenvalues))
    }

    pub fn build(grid: SpatialGrid, kind: KineticDiscretization) -> Result<Self> {
        match kind {
            KineticDiscretization::FiniteDifference => Ok(Self::finite_difference(grid)),
            KineticDiscretization::FourierSpectral => Self::spectral(grid),
        }
    }

    fn from_parts(grid: SpatialGrid, kind: KineticDiscretization, eigenvalues: Vec<f64>) -> Self {
        Self { grid, kind, eigenvalues, plans: FftPlans::new(grid.n()), dense: OnceLock::new() }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn kind(&self) -> KineticDiscretization {
        self.kind
    }

    /// Eigenvalues in FFT frequency order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Operator norm, the largest eigenvalue.
    pub fn norm(&self) -> f64 {
        self.eigenvalues.iter().cloned().fold(0.0, f64::max)
    }

    pub(crate) fn check_grid(&self, grid: &SpatialGrid) -> Result<()> {
        if grid != &self.grid {
            return Err(Error::GridMismatch(format!("state on {grid:?}, operator on {:?}", self.grid)));
        }
        Ok(())
    }

    /// Normalized multiplier `e^{-iθλ_j} / n`. Both discretizations satisfy
    /// `λ_j = λ_{n-j}`, so only half the phases are evaluated.
    pub fn phase_table(&self, theta: f64) -> Vec<Complex64> {
        let n = self.eigenvalues.len();
        let inv_n = 1.0 / n as f64;
        let mut table = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..=n / 2 {
            let (s, c) = (theta * self.eigenvalues[j]).sin_cos();
            let z = Complex64::new(c * inv_n, -s * inv_n);
            table[j] = z;
            table[(n - j) % n] = z;
        }
        table
    }

    /// Applies `exp(-iθH1)` in place to each length-`n` column of `data`.
    pub fn apply_exp_in_place(&self, theta: f64, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        if theta == 0.0 {
            return;
        }
        let table = self.phase_table(theta);
        self.plans.apply_multiplier(&table, data, scratch);
    }

    /// `exp(-iθH1) ψ`, computed as inverse FFT of phase-multiplied forward FFT.
    pub fn apply_exp(&self, theta: f64, psi: &StateVector) -> Result<StateVector> {
        self.check_grid(psi.grid())?;
        let mut out = psi.clone();
        let mut scratch = Vec::new();
        self.apply_exp_in_place(theta, out.amplitudes_mut(), &mut scratch);
        Ok(out)
    }

    /// `H1 ψ` by FFT.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.check_grid(psi.grid())?;
        let n = self.eigenvalues.len() as f64;
        let symbol: Vec<Complex64> = self.eigenvalues.iter().map(|&l| Complex64::new(l / n, 0.0)).collect();
        let mut out = psi.clone();
        let mut scratch = Vec::new();
        self.plans.apply_multiplier(&symbol, out.amplitudes_mut(), &mut scratch);
        Ok(out)
    }

    /// Dense matrix, built on first use.
    pub fn dense(&self) -> Result<&CMatrix> {
        check_dense_cap(self.grid.n())?;
        Ok(self.dense.get_or_init(|| match self.kind {
            KineticDiscretization::FiniteDifference => {
                let n = self.grid.n();
                let s2 = self.grid.scale().powi(2);
                let mut m = CMatrix::zeros(n, n);
                for j in 0..n {
                    m[(j, j)] += Complex64::new(2.0 * s2, 0.0);
                    m[(j, (j + 1) % n)] += Complex64::new(-s2, 0.0);
                    m[(j, (j + n - 1) % n)] += Complex64::new(-s2, 0.0);
                }
                m
            }
            KineticDiscretization::FourierSpectral => {
                let symbol: Vec<Complex64> = self.eigenvalues.iter().map(|&l| Complex64::new(l, 0.0)).collect();
                let mut m = circulant_from_symbol(&symbol).expect("dense cap checked above");
                // the symbol is real and even, so the matrix is real symmetric
                m.iter_mut().for_each(|z| z.im = 0.0);
                m
            }
        }))
    }

    /// Dense `exp(-iθH1)`, a circulant built from the phase table.
    pub fn dense_exp(&self, theta: f64) -> Result<CMatrix> {
        let n = self.grid.n() as f64;
        let symbol: Vec<Complex64> = self.phase_table(theta).into_iter().map(|z| z * n).collect();
        circulant_from_symbol(&symbol)
    }
}

/// Standard FFT frequency ordering `0, 1, …, ⌈n/2⌉-1, -⌊n/2⌋, …, -1`.
pub fn fft_frequencies(n: usize) -> Vec<i64> {
    let half = n.div_ceil(2) as i64;
    (0..n as i64).map(|j| if j < half { j } else { j - n as i64 }).collect()
}
