//! Fast-forwarded exponentials, the four splitting schemes, multi-step
//! evolution, the self-converged reference solution and dense propagators.

mod reference;
mod scheme;

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

pub use reference::{DenseReference, DoublingStep, ReferenceSolution, MAX_REFERENCE_STEPS, MIN_REFERENCE_TOL, REFERENCE_START_STEPS};
pub use scheme::{Scheme, StepFactors};

use crate::controls::ControlPair;
use crate::discretization::{check_dense_cap, CMatrix, KineticOperator, PotentialOperator, StateVector};
use crate::error::{Error, Result};

/// `exp(-iθH1) ψ`.
pub fn apply_exp_kinetic(theta: f64, kinetic: &KineticOperator, psi: &StateVector) -> Result<StateVector> {
    kinetic.apply_exp(theta, psi)
}

/// `exp(-iθH2) ψ`.
pub fn apply_exp_potential(theta: f64, potential: &PotentialOperator, psi: &StateVector) -> Result<StateVector> {
    potential.apply_exp(theta, psi)
}

/// Options for [`Propagator::evolve`].
#[derive(Debug, Clone, Copy, Default)]
pub struct EvolveOptions {
    /// Record `(t_l, ψ_l)` every this many steps (plus the initial and final state).
    pub snapshot_every: Option<usize>,
    /// Keep the per-step norm drift `|‖ψ_l‖ - ‖ψ_0‖|`; the maximum is always tracked.
    pub record_norm_drift: bool,
}

impl EvolveOptions {
    pub fn snapshots(every: usize) -> Self {
        Self { snapshot_every: Some(every.max(1)), record_norm_drift: false }
    }
}

/// Output of a multi-step evolution.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub state: StateVector,
    pub snapshots: Vec<(f64, StateVector)>,
    pub norm_drift: Vec<f64>,
    pub max_norm_drift: f64,
    pub steps: usize,
    pub wall_time: std::time::Duration,
}

/// The operators and controls defining `H(t) = f1(t) H1 + f2(t) H2`.
#[derive(Debug, Clone, Copy)]
pub struct Propagator<'a> {
    controls: &'a ControlPair,
    kinetic: &'a KineticOperator,
    potential: &'a PotentialOperator,
}

impl<'a> Propagator<'a> {
    pub fn new(controls: &'a ControlPair, kinetic: &'a KineticOperator, potential: &'a PotentialOperator) -> Result<Self> {
        if kinetic.grid() != potential.grid() {
            return Err(Error::GridMismatch(format!(
                "kinetic operator on {:?}, potential on {:?}",
                kinetic.grid(),
                potential.grid()
            )));
        }
        Ok(Self { controls, kinetic, potential })
    }

    pub fn controls(&self) -> &'a ControlPair {
        self.controls
    }

    pub fn kinetic(&self) -> &'a KineticOperator {
        self.kinetic
    }

    pub fn potential(&self) -> &'a PotentialOperator {
        self.potential
    }

    pub fn n(&self) -> usize {
        self.kinetic.grid().n()
    }

    fn check_state(&self, psi: &StateVector) -> Result<()> {
        if psi.grid() != self.kinetic.grid() {
            return Err(Error::GridMismatch(format!("state on {:?}, operators on {:?}", psi.grid(), self.kinetic.grid())));
        }
        Ok(())
    }

    fn check_interval(&self, t0: f64, t1: f64, steps: usize) -> Result<()> {
        if steps == 0 {
            return Err(Error::invalid("number of steps must be at least 1"));
        }
        if !(t0.is_finite() && t1.is_finite() && t1 >= t0) {
            return Err(Error::invalid(format!("invalid time interval [{t0}, {t1}]")));
        }
        Ok(())
    }

    /// One step of `scheme` on `[t, t + h]`.
    pub fn step(&self, scheme: Scheme, t: f64, h: f64, psi: &StateVector) -> Result<StateVector> {
        self.check_state(psi)?;
        let f = scheme.factors(self.controls, t, h)?;
        let mut out = psi.clone();
        let mut scratch = Vec::new();
        let data = out.amplitudes_mut();
        self.kinetic.apply_exp_in_place(f.kinetic_first, data, &mut scratch);
        self.potential.apply_exp_in_place(f.potential, data);
        self.kinetic.apply_exp_in_place(f.kinetic_last, data, &mut scratch);
        Ok(out)
    }

    /// Runs `steps` equal steps on `[t0, t1]` over every column of `data`.
    ///
    /// Adjacent kinetic exponentials of consecutive steps are merged into one,
    /// which is exact because they commute. `per_step` sees the state after
    /// each step up to a pending kinetic factor (norms are unaffected);
    /// `snapshot` sees the exact state every `snapshot_every` steps.
    fn run_steps(
        &self,
        scheme: Scheme,
        t0: f64,
        t1: f64,
        steps: usize,
        data: &mut [Complex64],
        snapshot_every: usize,
        per_step: &mut dyn FnMut(usize, &[Complex64]),
        snapshot: &mut dyn FnMut(usize, f64, &[Complex64]),
    ) -> Result<()> {
        let h = (t1 - t0) / steps as f64;
        let mut scratch = Vec::new();
        let mut pending = 0.0;
        for l in 0..steps {
            let t = t0 + l as f64 * h;
            let f = scheme.factors(self.controls, t, h)?;
            pending += f.kinetic_first;
            if f.potential != 0.0 {
                self.kinetic.apply_exp_in_place(pending, data, &mut scratch);
                pending = 0.0;
                self.potential.apply_exp_in_place(f.potential, data);
            }
            pending += f.kinetic_last;
            per_step(l + 1, data);
            if snapshot_every > 0 && ((l + 1) % snapshot_every == 0 || l + 1 == steps) {
                self.kinetic.apply_exp_in_place(pending, data, &mut scratch);
                pending = 0.0;
                snapshot(l + 1, if l + 1 == steps { t1 } else { t + h }, data);
            }
        }
        self.kinetic.apply_exp_in_place(pending, data, &mut scratch);
        Ok(())
    }

    /// `steps` equal steps of `scheme` from `t0` to `t1`.
    pub fn evolve(
        &self,
        scheme: Scheme,
        psi0: &StateVector,
        t0: f64,
        t1: f64,
        steps: usize,
        options: EvolveOptions,
    ) -> Result<EvolutionResult> {
        self.check_state(psi0)?;
        self.check_interval(t0, t1, steps)?;
        let start = Instant::now();
        let grid = *psi0.grid();
        let norm0 = psi0.norm2();
        let mut data = psi0.amplitudes().to_vec();
        let mut drift_log = Vec::new();
        let mut max_drift: f64 = 0.0;
        let mut snapshots = Vec::new();
        let every = options.snapshot_every.unwrap_or(0);
        if every > 0 {
            snapshots.push((t0, psi0.clone()));
        }
        let record = options.record_norm_drift;
        self.run_steps(
            scheme,
            t0,
            t1,
            steps,
            &mut data,
            every,
            &mut |_, d| {
                let drift = (d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() - norm0).abs();
                max_drift = max_drift.max(drift);
                if record {
                    drift_log.push(drift);
                }
            },
            &mut |_, t, d| snapshots.push((t, StateVector::new(grid, d.to_vec()).expect("finite state"))),
        )?;
        let state = StateVector::new(grid, data)?;
        Ok(EvolutionResult {
            state,
            snapshots,
            norm_drift: drift_log,
            max_norm_drift: max_drift,
            steps,
            wall_time: start.elapsed(),
        })
    }

    /// Final state only.
    pub fn evolve_state(&self, scheme: Scheme, psi0: &StateVector, t0: f64, t1: f64, steps: usize) -> Result<StateVector> {
        self.check_state(psi0)?;
        self.check_interval(t0, t1, steps)?;
        let mut data = psi0.amplitudes().to_vec();
        self.run_steps(scheme, t0, t1, steps, &mut data, 0, &mut |_, _| {}, &mut |_, _, _| {})?;
        StateVector::new(*psi0.grid(), data)
    }

    /// Evolves a column-major block of states (each column of length `n`) in parallel.
    pub fn evolve_columns(&self, scheme: Scheme, data: &mut [Complex64], t0: f64, t1: f64, steps: usize) -> Result<()> {
        self.check_interval(t0, t1, steps)?;
        let n = self.n();
        if data.len() % n != 0 {
            return Err(Error::DimensionMismatch(format!("block of length {} is not a multiple of n = {n}", data.len())));
        }
        let columns = data.len() / n;
        if columns == 0 {
            return Ok(());
        }
        let chunk_columns = columns.div_ceil(rayon::current_num_threads());
        data.par_chunks_mut(chunk_columns * n)
            .map(|chunk| self.run_steps(scheme, t0, t1, steps, chunk, 0, &mut |_, _| {}, &mut |_, _, _| {}))
            .collect::<Result<Vec<()>>>()?;
        Ok(())
    }

    /// Dense matrix of the `steps`-step scheme propagator on `[t0, t1]`.
    pub fn dense_propagator(&self, scheme: Scheme, t0: f64, t1: f64, steps: usize) -> Result<CMatrix> {
        let n = self.n();
        check_dense_cap(n)?;
        let mut data = identity_columns(n);
        self.evolve_columns(scheme, &mut data, t0, t1, steps)?;
        Ok(CMatrix::from_vec(n, n, data))
    }
}

pub(crate) fn identity_columns(n: usize) -> Vec<Complex64> {
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        data[j * n + j] = Complex64::new(1.0, 0.0);
    }
    data
}

/// One step of `scheme` on `[t, t + h]`.
pub fn trotter_step(
    scheme: Scheme,
    controls: &ControlPair,
    kinetic: &KineticOperator,
    potential: &PotentialOperator,
    t: f64,
    h: f64,
    psi: &StateVector,
) -> Result<StateVector> {
    Propagator::new(controls, kinetic, potential)?.step(scheme, t, h, psi)
}

/// `steps` equal steps on `[0, T]`, with snapshots every `snapshot_every` steps when given.
pub fn evolve(
    scheme: Scheme,
    controls: &ControlPair,
    kinetic: &KineticOperator,
    potential: &PotentialOperator,
    horizon: f64,
    steps: usize,
    psi0: &StateVector,
    snapshot_every: Option<usize>,
) -> Result<EvolutionResult> {
    let options = EvolveOptions { snapshot_every, record_norm_drift: true };
    Propagator::new(controls, kinetic, potential)?.evolve(scheme, psi0, 0.0, horizon, steps, options)
}

/// Self-converged reference `U(T, 0) ψ0` to tolerance `tol` in the rescaled norm.
pub fn reference_evolve(
    controls: &ControlPair,
    kinetic: &KineticOperator,
    potential: &PotentialOperator,
    horizon: f64,
    tol: f64,
    psi0: &StateVector,
) -> Result<StateVector> {
    Ok(Propagator::new(controls, kinetic, potential)?.reference(psi0, 0.0, horizon, tol)?.state)
}

/// Dense scheme propagator on `[0, T]`.
pub fn dense_propagator(
    scheme: Scheme,
    controls: &ControlPair,
    kinetic: &KineticOperator,
    potential: &PotentialOperator,
    horizon: f64,
    steps: usize,
) -> Result<CMatrix> {
    Propagator::new(controls, kinetic, potential)?.dense_propagator(scheme, 0.0, horizon, steps)
}

/// Dense self-converged reference propagator on `[0, T]`.
pub fn dense_reference_propagator(
    controls: &ControlPair,
    kinetic: &KineticOperator,
    potential: &PotentialOperator,
    horizon: f64,
    tol: f64,
) -> Result<CMatrix> {
    Ok(Propagator::new(controls, kinetic, potential)?.dense_reference(0.0, horizon, tol)?.matrix)
}

/// `‖U†U - I‖_F / √n`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let mut gram = u.adjoint() * u;
    for j in 0..n {
        gram[(j, j)] -= Complex64::new(1.0, 0.0);
    }
    gram.norm() / (n as f64).sqrt()
}
