use std::time::Instant;

use trotter_core::analysis::{apply_commutator, apply_double_commutator, commutator, estimate_operator_norm};
use trotter_core::discretization::{DifferenceOperator, KineticDiscretization, StateVector};
use trotter_core::Error as CoreError;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::{ExperimentOutput, ResultRow};
use crate::pool::run_pool;

/// Largest grid of the dense operator-norm study.
pub const NORM_SCALING_MAX_N: usize = 512;

/// Operator norms, in output order.
pub const OPERATOR_QUANTITIES: [&str; 6] = ["h1_norm", "h2_norm", "d1_norm", "c12_norm", "c112_norm", "c221_norm"];
/// Rescaled norms of the operators applied to `v = cos x`, in output order.
pub const VECTOR_QUANTITIES: [&str; 6] = ["v_star", "h1v_star", "d1v_star", "c12v_star", "c112v_star", "c221v_star"];

struct Point {
    kind: KineticDiscretization,
    n: usize,
    values: Vec<f64>,
    walltime_ms: f64,
}

fn measure(cfg: &ExperimentConfig, kind: KineticDiscretization, n: usize) -> Result<Point> {
    if n > NORM_SCALING_MAX_N {
        return Err(CoreError::DenseCap { n, cap: NORM_SCALING_MAX_N }.into());
    }
    let start = Instant::now();
    let (k, p) = cfg.operators(kind, n)?;
    let d = DifferenceOperator::for_kinetic(*k.grid(), kind)?;
    let h1 = k.dense()?;
    let h2 = p.dense()?;
    let c12 = commutator(h1, &h2)?;
    let c112 = commutator(h1, &c12)?;
    let c221 = commutator(&h2, &commutator(&h2, h1)?)?;

    let v = StateVector::sample_function(f64::cos, *k.grid())?;
    let c12v = apply_commutator(&k, &p, &v)?;
    // [H2, [H2, H1]] v = -[H2, [H1, H2]] v
    let c221v = apply_commutator(&k, &p, &p.apply(&v)?)?.sub(&p.apply(&c12v)?)?;
    let values = vec![
        k.norm(),
        p.norm(),
        d.norm(),
        estimate_operator_norm(&c12)?,
        estimate_operator_norm(&c112)?,
        estimate_operator_norm(&c221)?,
        v.rescaled_norm(),
        k.apply(&v)?.rescaled_norm(),
        d.apply(&v)?.rescaled_norm(),
        c12v.rescaled_norm(),
        apply_double_commutator(&k, &p, &v)?.rescaled_norm(),
        c221v.rescaled_norm(),
    ];
    Ok(Point { kind, n, values, walltime_ms: start.elapsed().as_secs_f64() * 1e3 })
}

/// Operator norms of `H1`, `H2`, `D1` and the commutators, plus the matching
/// vector norms on `v = cos x`, for every grid size; slopes against `n`.
pub fn run_norm_scaling(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let tasks: Vec<(KineticDiscretization, usize)> =
        cfg.discretizations.iter().flat_map(|&d| cfg.n.iter().map(move |&n| (d, n))).collect();
    let points = run_pool(cfg.threads, &tasks, |&(d, n)| measure(cfg, d, n))?;
    let label = cfg.label(None);
    let names: Vec<&str> = OPERATOR_QUANTITIES.iter().chain(VECTOR_QUANTITIES.iter()).copied().collect();
    let mut out = ExperimentOutput::default();
    for pt in &points {
        let wall = cfg.record_walltime.then_some(pt.walltime_ms);
        for (q, &v) in names.iter().zip(&pt.values) {
            out.rows.push(ResultRow::measurement(&label, None, Some(pt.kind), q, v)?.at_n(pt.n).timed(wall));
        }
    }
    for &kind in &cfg.discretizations {
        for (i, q) in names.iter().enumerate() {
            let series: Vec<(f64, f64)> =
                points.iter().filter(|p| p.kind == kind).map(|p| (p.n as f64, p.values[i])).collect();
            let template = ResultRow::measurement(&label, None, Some(kind), q, 0.0)?;
            out.add_slope(&template, "n", &series);
        }
    }
    Ok(out)
}
