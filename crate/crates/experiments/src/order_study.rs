use std::time::Instant;

use trotter_core::analysis::{estimate_operator_norm, vector_bound_report, BoundsReport, OperatorNorms};
use trotter_core::discretization::{KineticDiscretization, StateVector};
use trotter_core::propagators::{EvolveOptions, Propagator, Scheme};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::{ExperimentOutput, ResultRow};
use crate::pool::run_pool;

/// Reference tolerance when the config leaves it unset.
pub const ORDER_STUDY_REFERENCE_TOL: f64 = 1e-11;
/// Largest grid for which the operator error and operator bound are also reported.
pub const ORDER_STUDY_OPERATOR_MAX_N: usize = 64;
/// Snapshots taken along the reference trajectory for the vector bound.
pub const TRAJECTORY_SNAPSHOTS: usize = 32;

struct Point {
    kind: KineticDiscretization,
    a: f64,
    n: usize,
    /// `(scheme, L, quantity, value)`.
    values: Vec<(Scheme, usize, &'static str, f64)>,
    walltime_ms: f64,
}

fn measure(cfg: &ExperimentConfig, kind: KineticDiscretization, a: f64, n: usize) -> Result<Point> {
    let start = Instant::now();
    let tol = cfg.reference_tol.unwrap_or(ORDER_STUDY_REFERENCE_TOL);
    let horizon = cfg.horizon;
    let controls = cfg.controls(a)?;
    let (k, p) = cfg.operators(kind, n)?;
    let prop = Propagator::new(&controls, &k, &p)?;
    let psi0 = StateVector::sample_function(f64::cos, *k.grid())?;
    let reference = prop.reference(&psi0, 0.0, horizon, tol)?;
    let norm0 = psi0.norm2();

    // trajectory for the vector bound, at the reference resolution
    let every = (reference.steps / TRAJECTORY_SNAPSHOTS).max(1);
    let trajectory = prop.evolve(Scheme::G2, &psi0, 0.0, horizon, reference.steps, EvolveOptions::snapshots(every))?;

    let dense = if n <= ORDER_STUDY_OPERATOR_MAX_N {
        let u_ref = prop.dense_reference(0.0, horizon, tol)?.matrix;
        let norms = OperatorNorms::compute(&k, &p)?;
        Some((u_ref, norms, controls.norms(horizon)?))
    } else {
        None
    };

    let mut values = Vec::new();
    for &scheme in &cfg.schemes {
        for &steps in &cfg.steps {
            let psi = prop.evolve_state(scheme, &psi0, 0.0, horizon, steps)?;
            values.push((scheme, steps, "vec_error", psi.distance(&reference.state)? / norm0));
            let vb = vector_bound_report(scheme, &trajectory.snapshots, &k, horizon, steps)?;
            values.push((scheme, steps, "vector_bound_factor", vb.bound_factor));
            if let Some((u_ref, ops, control_norms)) = &dense {
                let u = prop.dense_propagator(scheme, 0.0, horizon, steps)?;
                values.push((scheme, steps, "op_error", estimate_operator_norm(&(u - u_ref))?));
                let bound = BoundsReport::evaluate(scheme, control_norms.clone(), *ops, horizon, steps)?.bound;
                values.push((scheme, steps, "operator_bound", bound));
            }
        }
    }
    Ok(Point { kind, a, n, values, walltime_ms: start.elapsed().as_secs_f64() * 1e3 })
}

/// Vector error against the reference over a ladder of step counts at fixed
/// `n` and `T`, with the vector-bound factor alongside; for small grids also
/// the operator error and the evaluated global operator bound. Slopes against `L`.
pub fn run_order_study(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let mut tasks = Vec::new();
    for &d in &cfg.discretizations {
        for &a in &cfg.a {
            for &n in &cfg.n {
                tasks.push((d, a, n));
            }
        }
    }
    let points = run_pool(cfg.threads, &tasks, |&(d, a, n)| measure(cfg, d, a, n))?;
    let mut out = ExperimentOutput::default();
    for pt in &points {
        let label = cfg.label(Some(pt.a));
        let wall = cfg.record_walltime.then_some(pt.walltime_ms);
        for &(scheme, steps, q, v) in &pt.values {
            let row = ResultRow::measurement(&label, Some(scheme), Some(pt.kind), q, v)?;
            out.rows.push(row.at_n(pt.n).at_steps(steps).timed(wall));
        }
    }
    for pt in &points {
        let label = cfg.label(Some(pt.a));
        for &scheme in &cfg.schemes {
            for q in ["vec_error", "vector_bound_factor", "op_error", "operator_bound"] {
                let series: Vec<(f64, f64)> = pt
                    .values
                    .iter()
                    .filter(|(s, _, name, _)| *s == scheme && *name == q)
                    .map(|&(_, l, _, v)| (l as f64, v))
                    .collect();
                let template = ResultRow::measurement(&label, Some(scheme), Some(pt.kind), q, 0.0)?.at_n(pt.n);
                out.add_slope(&template, "L", &series);
            }
        }
    }
    Ok(out)
}
