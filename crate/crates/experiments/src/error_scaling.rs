use std::time::Instant;

use trotter_core::analysis::estimate_operator_norm;
use trotter_core::discretization::{KineticDiscretization, StateVector};
use trotter_core::propagators::{Propagator, Scheme};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::{ExperimentOutput, ResultRow};
use crate::pool::run_pool;

/// Reference tolerance when the config leaves it unset.
pub const ERROR_SCALING_REFERENCE_TOL: f64 = 1e-11;

pub const QUANTITIES: [&str; 3] = ["op_error", "op_error_rel", "vec_error"];

struct Point {
    kind: KineticDiscretization,
    a: f64,
    n: usize,
    /// `(scheme, L, [op_error, op_error_rel, vec_error])`.
    values: Vec<(Scheme, usize, [f64; 3])>,
    walltime_ms: f64,
}

fn measure(cfg: &ExperimentConfig, kind: KineticDiscretization, a: f64, n: usize) -> Result<Point> {
    let start = Instant::now();
    let tol = cfg.reference_tol.unwrap_or(ERROR_SCALING_REFERENCE_TOL);
    let controls = cfg.controls(a)?;
    let (k, p) = cfg.operators(kind, n)?;
    let prop = Propagator::new(&controls, &k, &p)?;
    let u_ref = prop.dense_reference(0.0, cfg.horizon, tol)?.matrix;
    let u_ref_norm = estimate_operator_norm(&u_ref)?;
    let psi0 = StateVector::sample_function(f64::cos, *k.grid())?;
    let psi_ref = prop.reference(&psi0, 0.0, cfg.horizon, tol)?.state;
    let psi0_norm = psi0.norm2();
    let mut values = Vec::new();
    for &scheme in &cfg.schemes {
        for &steps in &cfg.steps {
            let u = prop.dense_propagator(scheme, 0.0, cfg.horizon, steps)?;
            let op = estimate_operator_norm(&(u - &u_ref))?;
            let psi = prop.evolve_state(scheme, &psi0, 0.0, cfg.horizon, steps)?;
            let vec = psi.distance(&psi_ref)? / psi0_norm;
            values.push((scheme, steps, [op, op / u_ref_norm, vec]));
        }
    }
    Ok(Point { kind, a, n, values, walltime_ms: start.elapsed().as_secs_f64() * 1e3 })
}

/// Operator error `‖U_scheme - U_ref‖` (absolute and relative to `‖U_ref‖`)
/// and vector error `‖ψ_scheme - ψ_ref‖ / ‖ψ0‖` with `ψ0 = cos x`, per scheme,
/// step count and grid size; slopes against `n`.
pub fn run_error_scaling(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
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
        for &(scheme, steps, vals) in &pt.values {
            for (q, v) in QUANTITIES.iter().zip(vals) {
                let row = ResultRow::measurement(&label, Some(scheme), Some(pt.kind), q, v)?;
                out.rows.push(row.at_n(pt.n).at_steps(steps).timed(wall));
            }
        }
    }
    for &d in &cfg.discretizations {
        for &a in &cfg.a {
            let label = cfg.label(Some(a));
            for &scheme in &cfg.schemes {
                for &steps in &cfg.steps {
                    for (i, q) in QUANTITIES.iter().enumerate() {
                        let series: Vec<(f64, f64)> = points
                            .iter()
                            .filter(|p| p.kind == d && p.a == a)
                            .flat_map(|p| {
                                p.values
                                    .iter()
                                    .filter(|(s, l, _)| *s == scheme && *l == steps)
                                    .map(move |(_, _, v)| (p.n as f64, v[i]))
                            })
                            .collect();
                        let template = ResultRow::measurement(&label, Some(scheme), Some(d), q, 0.0)?.at_steps(steps);
                        out.add_slope(&template, "n", &series);
                    }
                }
            }
        }
    }
    Ok(out)
}
