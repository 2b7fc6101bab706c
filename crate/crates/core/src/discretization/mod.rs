//! Periodic grids, the discretized operators `H1` (kinetic), `H2` (potential),
//! `D1` (first-difference factor of `H1`) and state vectors.

mod difference;
mod grid;
mod kinetic;
mod potential;
mod state;

use std::f64::consts::PI;
use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use difference::{DifferenceKind, DifferenceOperator};
pub use grid::SpatialGrid;
pub use kinetic::{KineticDiscretization, KineticOperator};
pub use potential::{Potential, PotentialOperator};
pub use state::StateVector;

use crate::error::{Error, Result};
use crate::DENSE_CAP;

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;

pub(crate) fn check_dense_cap(n: usize) -> Result<()> {
    if n > DENSE_CAP {
        return Err(Error::DenseCap { n, cap: DENSE_CAP });
    }
    Ok(())
}

/// Dense circulant matrix `F diag(symbol) F†` for a symbol given in FFT order,
/// i.e. the matrix of `v ↦ ifft(symbol ⊙ fft(v)) / n`.
pub fn circulant_from_symbol(symbol: &[Complex64]) -> Result<CMatrix> {
    let n = symbol.len();
    check_dense_cap(n)?;
    let roots: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect();
    let column: Vec<Complex64> = (0..n)
        .map(|d| symbol.iter().enumerate().map(|(m, s)| s * roots[(m * d) % n]).sum::<Complex64>() / n as f64)
        .collect();
    Ok(CMatrix::from_fn(n, n, |j, k| column[(j + n - k) % n]))
}

/// Writes a dense matrix row-major, each cell as an `re,im` pair.
pub fn write_matrix_csv<W: Write>(matrix: &CMatrix, mut out: W) -> io::Result<()> {
    for row in matrix.row_iter() {
        let cells: Vec<String> = row.iter().map(|z| format!("{:e},{:e}", z.re, z.im)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
