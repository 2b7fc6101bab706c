//! Standard and generalized Trotter propagators for the bilinear control
//! Hamiltonian `H(t) = f1(t) H1 + f2(t) H2` on a periodic one-dimensional grid.
//!
//! * [`controls`]: scalar control functions, integrals and sup-norms.
//! * [`discretization`]: grids, kinetic/potential/difference operators, state vectors.
//! * [`propagators`]: the four splitting schemes, multi-step evolution and reference solutions.
//! * [`analysis`]: commutators, norm estimators, error-bound preconstants and consistency checks.

pub mod analysis;
pub mod controls;
pub mod discretization;
pub mod error;
pub mod numerics;
pub mod propagators;

pub use error::{Error, Result};

/// Largest grid size for which dense matrices are materialized.
pub const DENSE_CAP: usize = 4096;
