use std::time::Instant;

use trotter_core::discretization::{KineticDiscretization, StateVector};
use trotter_core::propagators::{Propagator, Scheme};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::{ExperimentOutput, ResultRow};
use crate::pool::run_pool;

/// Step counts beyond this are reported as censored.
pub const MAX_SEARCH_STEPS: usize = 1 << 26;

/// Outcome of a minimal-step search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSearch {
    /// `steps` passes and `steps - 1` fails (or `steps == 1`).
    Found { steps: usize, error: f64, evaluations: usize },
    /// No step count up to [`MAX_SEARCH_STEPS`] passed.
    Censored { tried: usize, error: f64 },
}

/// Smallest `L` with `error_at(L) <= epsilon`: doubling from 1 to bracket the
/// first pass, then bisection between the last failing and first passing count.
pub fn find_min_steps<F>(epsilon: f64, mut error_at: F) -> Result<StepSearch>
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut evaluations = 0;
    let mut eval = |l: usize| {
        evaluations += 1;
        error_at(l)
    };
    let mut hi = 1;
    let mut hi_error = eval(hi)?;
    while hi_error > epsilon {
        if hi * 2 > MAX_SEARCH_STEPS {
            return Ok(StepSearch::Censored { tried: hi, error: hi_error });
        }
        hi *= 2;
        hi_error = eval(hi)?;
    }
    let mut lo = hi / 2;
    while lo > 0 && hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let e = eval(mid)?;
        if e <= epsilon {
            hi = mid;
            hi_error = e;
        } else {
            lo = mid;
        }
    }
    Ok(StepSearch::Found { steps: hi, error: hi_error, evaluations })
}

/// Reference tolerance for one target error.
pub fn reference_tol(cfg: &ExperimentConfig, epsilon: f64) -> f64 {
    cfg.reference_tol.unwrap_or_else(|| (epsilon / 100.0).min(1e-10))
}

struct Point {
    kind: KineticDiscretization,
    a: f64,
    pair: usize,
    scheme: Scheme,
    search: StepSearch,
    walltime_ms: f64,
}

/// For each scheme and paired `(epsilon_i, n_i)`, the smallest step count whose
/// relative vector error against the reference is at most `epsilon_i`; slopes
/// of `L` against `1/epsilon` over the uncensored points.
pub fn run_steps_vs_epsilon(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let pairs: Vec<(f64, usize)> = cfg.epsilon.iter().copied().zip(cfg.n.iter().copied()).collect();

    let mut ref_tasks = Vec::new();
    for &d in &cfg.discretizations {
        for &a in &cfg.a {
            for i in 0..pairs.len() {
                ref_tasks.push((d, a, i));
            }
        }
    }
    let references = run_pool(cfg.threads, &ref_tasks, |&(d, a, i)| -> Result<(StateVector, StateVector, f64)> {
        let start = Instant::now();
        let (eps, n) = pairs[i];
        let controls = cfg.controls(a)?;
        let (k, p) = cfg.operators(d, n)?;
        let prop = Propagator::new(&controls, &k, &p)?;
        let psi0 = StateVector::sample_function(f64::cos, *k.grid())?;
        let reference = prop.reference(&psi0, 0.0, cfg.horizon, reference_tol(cfg, eps))?.state;
        Ok((psi0, reference, start.elapsed().as_secs_f64() * 1e3))
    })?;

    let mut tasks = Vec::new();
    for (r, &(d, a, i)) in ref_tasks.iter().enumerate() {
        for &s in &cfg.schemes {
            tasks.push((r, d, a, i, s));
        }
    }
    let points = run_pool(cfg.threads, &tasks, |&(r, d, a, i, scheme)| -> Result<Point> {
        let start = Instant::now();
        let (eps, n) = pairs[i];
        let (psi0, reference, _) = &references[r];
        let controls = cfg.controls(a)?;
        let (k, p) = cfg.operators(d, n)?;
        let prop = Propagator::new(&controls, &k, &p)?;
        let norm0 = psi0.norm2();
        let search = find_min_steps(eps, |l| {
            Ok(prop.evolve_state(scheme, psi0, 0.0, cfg.horizon, l)?.distance(reference)? / norm0)
        })?;
        Ok(Point { kind: d, a, pair: i, scheme, search, walltime_ms: start.elapsed().as_secs_f64() * 1e3 })
    })?;

    let mut out = ExperimentOutput::default();
    for pt in &points {
        let label = cfg.label(Some(pt.a));
        let (eps, n) = pairs[pt.pair];
        let wall = cfg.record_walltime.then_some(pt.walltime_ms);
        let row = |q: &str, v: f64| -> Result<ResultRow> {
            Ok(ResultRow::measurement(&label, Some(pt.scheme), Some(pt.kind), q, v)?.at_n(n).at_epsilon(eps).timed(wall))
        };
        match pt.search {
            StepSearch::Found { steps, error, .. } => {
                out.rows.push(row("steps", steps as f64)?.at_steps(steps));
                out.rows.push(row("error_at_steps", error)?.at_steps(steps));
            }
            StepSearch::Censored { tried, error } => {
                out.rows.push(row("steps_censored", tried as f64)?.at_steps(tried));
                out.rows.push(row("error_at_steps", error)?.at_steps(tried));
            }
        }
    }
    for &d in &cfg.discretizations {
        for &a in &cfg.a {
            let label = cfg.label(Some(a));
            for &scheme in &cfg.schemes {
                let series: Vec<(f64, f64)> = points
                    .iter()
                    .filter(|p| p.kind == d && p.a == a && p.scheme == scheme)
                    .filter_map(|p| match p.search {
                        StepSearch::Found { steps, .. } => Some((1.0 / pairs[p.pair].0, steps as f64)),
                        StepSearch::Censored { .. } => None,
                    })
                    .collect();
                let template = ResultRow::measurement(&label, Some(scheme), Some(d), "steps", 0.0)?;
                out.add_slope(&template, "1/epsilon", &series);
            }
        }
    }
    Ok(out)
}
