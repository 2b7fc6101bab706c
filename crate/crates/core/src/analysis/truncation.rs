use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::discretization::SpatialGrid;
use crate::error::{Error, Result};
use crate::numerics::maximize_sampled;

type Derivative = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A smooth spatial profile `g` with derivatives up to order four.
#[derive(Clone)]
pub struct SmoothProfile {
    name: String,
    derivatives: [Derivative; 5],
}

impl fmt::Debug for SmoothProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothProfile").field("name", &self.name).finish()
    }
}

impl SmoothProfile {
    pub fn new(name: impl Into<String>, derivatives: [Derivative; 5]) -> Self {
        Self { name: name.into(), derivatives }
    }

    /// `cos(ω x)`.
    pub fn cosine(omega: f64) -> Self {
        Self::new(
            format!("cos({omega} x)"),
            [
                Arc::new(move |x: f64| (omega * x).cos()),
                Arc::new(move |x: f64| -omega * (omega * x).sin()),
                Arc::new(move |x: f64| -omega.powi(2) * (omega * x).cos()),
                Arc::new(move |x: f64| omega.powi(3) * (omega * x).sin()),
                Arc::new(move |x: f64| omega.powi(4) * (omega * x).cos()),
            ],
        )
    }

    /// `c0 + c1 x + c2 x²`.
    pub fn quadratic(c0: f64, c1: f64, c2: f64) -> Self {
        Self::new(
            "quadratic",
            [
                Arc::new(move |x: f64| c0 + c1 * x + c2 * x * x),
                Arc::new(move |x: f64| c1 + 2.0 * c2 * x),
                Arc::new(move |_| 2.0 * c2),
                Arc::new(|_| 0.0),
                Arc::new(|_| 0.0),
            ],
        )
    }

    pub fn eval(&self, x: f64, order: usize) -> f64 {
        (self.derivatives[order])(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub x: f64,
    /// `|s² (g(x+Δ) - 2g(x) + g(x-Δ)) - g''(x)|`.
    pub error: f64,
    /// `sup |g''''| / (3 s²)` over the grid interval.
    pub bound: f64,
    pub within_bound: bool,
}

/// Central-difference truncation error of `g''` at node `k`.
pub fn fd_truncation_error(g: &SmoothProfile, grid: &SpatialGrid, k: usize) -> Result<TruncationReport> {
    if k >= grid.n() {
        return Err(Error::invalid(format!("node {k} outside a grid of {} points", grid.n())));
    }
    let x = grid.node(k);
    let dx = grid.spacing();
    let s = grid.scale();
    let stencil = s * s * (g.eval(x + dx, 0) - 2.0 * g.eval(x, 0) + g.eval(x - dx, 0));
    let error = (stencil - g.eval(x, 2)).abs();
    let sup4 = maximize_sampled(|y| g.eval(y, 4).abs(), grid.x_lo(), grid.x_hi(), 10_000);
    let bound = sup4 / (3.0 * s * s);
    Ok(TruncationReport { x, error, bound, within_bound: error <= bound * (1.0 + 1e-12) + 1e-12 * s * s })
}
