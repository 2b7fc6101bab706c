use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n` equispaced nodes `x_k = x_lo + k Δx` on the periodic interval `[x_lo, x_hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    n: usize,
    x_lo: f64,
    x_hi: f64,
}

impl SpatialGrid {
    pub fn new(n: usize, x_lo: f64, x_hi: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::construction(format!("grid needs at least 3 points, got {n}")));
        }
        if !(x_lo.is_finite() && x_hi.is_finite() && x_hi > x_lo) {
            return Err(Error::construction(format!("invalid interval [{x_lo}, {x_hi})")));
        }
        Ok(Self { n, x_lo, x_hi })
    }

    /// `n` points on `[-π, π)`.
    pub fn symmetric_2pi(n: usize) -> Result<Self> {
        Self::new(n, -std::f64::consts::PI, std::f64::consts::PI)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }

    pub fn length(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn spacing(&self) -> f64 {
        self.length() / self.n as f64
    }

    /// Inverse spacing `s = n / (x_hi - x_lo)`.
    pub fn scale(&self) -> f64 {
        self.n as f64 / self.length()
    }

    pub fn node(&self, k: usize) -> f64 {
        self.x_lo + k as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.node(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_rules() {
        assert!(SpatialGrid::new(2, 0.0, 1.0).is_err());
        assert!(SpatialGrid::new(4, 1.0, 1.0).is_err());
        assert!(SpatialGrid::new(4, 0.0, f64::INFINITY).is_err());
        let g = SpatialGrid::new(4, 0.0, 2.0).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.scale(), 2.0);
        assert_eq!(g.nodes(), vec![0.0, 0.5, 1.0, 1.5]);
    }
}
