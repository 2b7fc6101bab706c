//! Entrywise closed forms of the commutators of a kinetic matrix with a diagonal potential.

use num_complex::Complex64;

use crate::discretization::{check_dense_cap, CMatrix, SpatialGrid};
use crate::error::{Error, Result};

fn check_len(a: &CMatrix, d: &[f64]) -> Result<()> {
    if !a.is_square() || a.nrows() != d.len() {
        return Err(Error::DimensionMismatch(format!("matrix {:?} with {} diagonal entries", a.shape(), d.len())));
    }
    Ok(())
}

/// `[A, diag(d)]` with entries `A_jk (d_k - d_j)`.
pub fn commutator_with_diagonal(a: &CMatrix, d: &[f64]) -> Result<CMatrix> {
    check_len(a, d)?;
    Ok(CMatrix::from_fn(a.nrows(), a.ncols(), |j, k| a[(j, k)] * (d[k] - d[j])))
}

/// `[diag(d), [diag(d), A]]` with entries `(d_j - d_k)² A_jk`.
pub fn double_diagonal_commutator(a: &CMatrix, d: &[f64]) -> Result<CMatrix> {
    check_len(a, d)?;
    Ok(CMatrix::from_fn(a.nrows(), a.ncols(), |j, k| a[(j, k)] * (d[j] - d[k]).powi(2)))
}

/// Scaled second differences `s² (v_{k+2} - 2 v_{k+1} + v_k)`, cyclic.
pub fn second_differences(values: &[f64], scale: f64) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|k| scale * scale * (values[(k + 2) % n] - 2.0 * values[(k + 1) % n] + values[k]))
        .collect()
}

/// `[H1, [H1, H2]]` for the finite-difference Laplacian: diagonal `-2 s² V⁽²⁾_{j-1}`,
/// `s² V⁽²⁾_j` at `(j, j+2)` and `s² V⁽²⁾_{j-2}` at `(j, j-2)`, with coinciding
/// positions summed for small `n`.
pub fn fd_double_kinetic_commutator(grid: &SpatialGrid, values: &[f64]) -> Result<CMatrix> {
    let n = grid.n();
    check_dense_cap(n)?;
    if values.len() != n {
        return Err(Error::DimensionMismatch(format!("{} potential values for {n} nodes", values.len())));
    }
    let s2 = grid.scale().powi(2);
    let v2 = second_differences(values, grid.scale());
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        m[(j, j)] += Complex64::new(-2.0 * s2 * v2[(j + n - 1) % n], 0.0);
        m[(j, (j + 2) % n)] += Complex64::new(s2 * v2[j], 0.0);
        m[(j, (j + n - 2) % n)] += Complex64::new(s2 * v2[(j + n - 2) % n], 0.0);
    }
    Ok(m)
}

/// `[H1, H2]` for the finite-difference Laplacian: `-s² (V_k - V_j)` on cyclic neighbours.
pub fn fd_kinetic_potential_commutator(grid: &SpatialGrid, values: &[f64]) -> Result<CMatrix> {
    let n = grid.n();
    check_dense_cap(n)?;
    if values.len() != n {
        return Err(Error::DimensionMismatch(format!("{} potential values for {n} nodes", values.len())));
    }
    let s2 = grid.scale().powi(2);
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in [(j + 1) % n, (j + n - 1) % n] {
            m[(j, k)] = Complex64::new(-s2 * (values[k] - values[j]), 0.0);
        }
    }
    Ok(m)
}
