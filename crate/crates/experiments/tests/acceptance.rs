//! Acceptance suite: one PASS/FAIL line per criterion, with a detail line per sub-check.
//!
//! Runs without the libtest harness so the report is always printed. Exits
//! non-zero when any sub-check fails that is not listed in `EXPECTED_FAILURES`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use trotter_core::analysis::commutators::{fd_double_kinetic_commutator, fd_kinetic_potential_commutator};
use trotter_core::analysis::{
    check_exchange_bound, error_representation_convergence, estimate_assumption_constants, estimate_operator_norm,
    exchange_xi_cap, fd_truncation_error, sample_family, standard_sample_family, SmoothProfile,
};
use trotter_core::controls::ControlPreset;
use trotter_core::discretization::{
    CMatrix, DifferenceOperator, KineticDiscretization, KineticOperator, Potential, PotentialOperator, SpatialGrid,
};
use trotter_core::propagators::{Propagator, Scheme};
use trotter_experiments::verify::check_local_bounds;
use trotter_experiments::{fit_loglog_slope, run, ExperimentConfig, ExperimentKind, ExperimentOutput};

use KineticDiscretization::{FiniteDifference, FourierSpectral};

/// Sub-checks known not to hold; reported as FAIL but not fatal.
/// The finite-difference `[H2,[H2,H1]]` norm is bounded in n: the double
/// commutator with a smooth diagonal is a weighted identity plus O(1/n²) terms.
const EXPECTED_FAILURES: &[&str] = &["3/c221_norm slope fd"];

struct Check {
    id: String,
    passed: bool,
    detail: String,
}

#[derive(Default)]
struct Criterion {
    checks: Vec<Check>,
}

impl Criterion {
    fn check(&mut self, id: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { id: id.into(), passed, detail: detail.into() });
    }

    fn within(&mut self, id: impl Into<String>, value: f64, target: f64, tol: f64) {
        let passed = (value - target).abs() <= tol;
        self.check(id, passed, format!("{value:.4} (want {target}±{tol})"));
    }

    fn at_most(&mut self, id: impl Into<String>, value: f64, limit: f64) {
        self.check(id, value <= limit, format!("{value:.3e} (limit {limit:e})"));
    }

    fn runtime(&mut self, number: usize, elapsed: Duration, limit: Duration) {
        let passed = elapsed <= limit;
        self.check(format!("{number}/runtime"), passed, format!("{:.2?} (limit {:?})", elapsed, limit));
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn grid(n: usize) -> SpatialGrid {
    SpatialGrid::symmetric_2pi(n).unwrap()
}

fn kind_id(kind: KineticDiscretization) -> &'static str {
    kind.id()
}

/// Cyclic `s²·tridiag(-1, 2, -1)`, built entry by entry.
fn fd_laplacian_oracle(g: &SpatialGrid) -> CMatrix {
    let n = g.n();
    let s2 = g.scale() * g.scale();
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        m[(j, j)] += Complex64::new(2.0 * s2, 0.0);
        m[(j, (j + 1) % n)] += Complex64::new(-s2, 0.0);
        m[(j, (j + n - 1) % n)] += Complex64::new(-s2, 0.0);
    }
    m
}

fn diagonal(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(values[i], 0.0) } else { Complex64::new(0.0, 0.0) })
}

fn criterion_1() -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    for n in [3, 4, 16, 256] {
        let g = grid(n);
        let h1 = KineticOperator::finite_difference(g);
        let h1 = h1.dense().unwrap();
        let d1 = DifferenceOperator::for_kinetic(g, FiniteDifference).unwrap().dense().unwrap();
        let rel = max_abs(&(d1.adjoint() * &d1 - h1)) / max_abs(h1);
        c.at_most(format!("1/factorization n={n}"), rel, 1e-12);

        let oracle = fd_laplacian_oracle(&g);
        c.at_most(format!("1/stencil n={n}"), max_abs(&(h1 - &oracle)) / max_abs(&oracle), 1e-12);

        let s2 = g.scale() * g.scale();
        let mut expected: Vec<f64> = (0..n).map(|j| 2.0 * s2 * (1.0 - (2.0 * PI * j as f64 / n as f64).cos())).collect();
        let mut computed: Vec<f64> = h1.clone().symmetric_eigen().eigenvalues.iter().cloned().collect();
        expected.sort_by(f64::total_cmp);
        computed.sort_by(f64::total_cmp);
        let scale = expected.last().cloned().unwrap_or(1.0).max(1.0);
        let gap = expected.iter().zip(&computed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
        c.at_most(format!("1/eigenvalues n={n} (relative to largest)"), gap, 1e-10);
    }
    c.runtime(1, start.elapsed(), Duration::from_secs(1));
    c
}

fn criterion_2() -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    let mut worst12 = 0.0f64;
    let mut worst112 = 0.0f64;
    for n in [4, 8, 16] {
        let g = grid(n);
        let h1 = fd_laplacian_oracle(&g);
        for seed in 0..3u64 {
            let v = Potential::random_trigonometric(1000 + seed, 4, g.x_lo(), g.x_hi());
            let values = PotentialOperator::build(v, g).unwrap().values().to_vec();
            let h2 = diagonal(&values);
            let c12 = &h1 * &h2 - &h2 * &h1;
            let c112 = &h1 * &c12 - &c12 * &h1;
            let closed12 = fd_kinetic_potential_commutator(&g, &values).unwrap();
            let closed112 = fd_double_kinetic_commutator(&g, &values).unwrap();
            worst12 = worst12.max(max_abs(&(closed12 - &c12)) / max_abs(&c12));
            worst112 = worst112.max(max_abs(&(closed112 - &c112)) / max_abs(&c112));
        }
    }
    c.at_most("2/[H1,H2] closed form", worst12, 1e-9);
    c.at_most("2/[H1,[H1,H2]] closed form", worst112, 1e-9);
    c.runtime(2, start.elapsed(), Duration::from_secs(5));
    c
}

fn criterion_3() -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    let cfg = ExperimentConfig::defaults(ExperimentKind::NormScaling);
    assert_eq!(cfg.n, (4..=9).map(|k| 1usize << k).collect::<Vec<_>>());
    let out = run(&cfg).unwrap();
    for kind in [FiniteDifference, FourierSpectral] {
        let slope = |q: &str| out.slope("norm-scaling", None, Some(kind), q).map_or(f64::NAN, |s| s.slope);
        let k = kind_id(kind);
        c.within(format!("3/c12_norm slope {k}"), slope("c12_norm"), 1.0, 0.1);
        c.within(format!("3/c112_norm slope {k}"), slope("c112_norm"), 2.0, 0.1);
        c.within(format!("3/h1_norm slope {k}"), slope("h1_norm"), 2.0, 0.05);
        c.within(format!("3/c221_norm slope {k}"), slope("c221_norm"), 1.0, 0.1);
        for q in ["v_star", "h1v_star", "d1v_star", "c12v_star", "c112v_star", "c221v_star"] {
            let v: Vec<f64> = out.measurements("norm-scaling", None, Some(kind), q).map(|r| r.value).collect();
            let hi = v.iter().cloned().fold(0.0, f64::max);
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            c.at_most(format!("3/{q} max/min {k}"), hi / lo, 2.0);
        }
    }
    c.runtime(3, start.elapsed(), Duration::from_secs(120));
    c
}

fn criterion_4() -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    let hs: Vec<f64> = (7..=12).map(|k| 2f64.powi(-k)).collect();
    let g = grid(16);
    for kind in [FiniteDifference, FourierSpectral] {
        let k = KineticOperator::build(g, kind).unwrap();
        let p = PotentialOperator::build(Potential::one_minus_cos(), g).unwrap();
        for a in [1.0, 10.0] {
            let pair = ControlPreset::OscillatingMass { a }.build(1.0).unwrap();
            let prop = Propagator::new(&pair, &k, &p).unwrap();
            let exact: Vec<CMatrix> = hs.iter().map(|&h| prop.dense_reference(0.0, h, 1e-13).unwrap().matrix).collect();
            for scheme in Scheme::ALL {
                let points: Vec<(f64, f64)> = hs
                    .iter()
                    .zip(&exact)
                    .map(|(&h, u)| (h, estimate_operator_norm(&(prop.dense_propagator(scheme, 0.0, h, 1).unwrap() - u)).unwrap()))
                    .collect();
                let fit = fit_loglog_slope(&points).unwrap();
                c.within(format!("4/{scheme} {} a={a} local exponent", kind_id(kind)), fit.slope, scheme.order() as f64 + 1.0, 0.2);
            }
        }
    }
    c.runtime(4, start.elapsed(), Duration::from_secs(60));
    c
}

fn criterion_5() -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    let r = check_local_bounds(&[16, 64], &[1e-3, 1e-4], &[1.0, 10.0]).unwrap();
    c.check("5/worst error/bound", r.passed, format!("{:.6} (limit 1); {}", r.value, r.detail));
    c.runtime(5, start.elapsed(), Duration::from_secs(300));
    c
}

fn slope_of(out: &ExperimentOutput, label: &str, scheme: Scheme, kind: KineticDiscretization, q: &str) -> (f64, f64) {
    out.slope(label, Some(scheme), Some(kind), q).map_or((f64::NAN, f64::NAN), |s| (s.slope, s.r2))
}

fn criterion_6() -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    let cfg = ExperimentConfig::defaults(ExperimentKind::ErrorScaling);
    assert_eq!((cfg.horizon, cfg.steps.as_slice(), cfg.a.as_slice()), (1e-3, &[10][..], &[1.0, 10.0][..]));
    let out = run(&cfg).unwrap();
    for &a in &cfg.a {
        let label = format!("error-scaling:a={a}");
        for kind in [FiniteDifference, FourierSpectral] {
            for scheme in Scheme::ALL {
                let target = if scheme == Scheme::G1 { 1.0 } else { 2.0 };
                let (op, _) = slope_of(&out, &label, scheme, kind, "op_error");
                c.within(format!("6/{scheme} {} a={a} op_error slope", kind_id(kind)), op, target, 0.2);
                let (vec, _) = slope_of(&out, &label, scheme, kind, "vec_error");
                c.within(format!("6/{scheme} {} a={a} vec_error slope", kind_id(kind)), vec, 0.0, 0.15);
            }
        }
    }
    c.runtime(6, start.elapsed(), Duration::from_secs(20 * 60));
    c
}

fn criterion_7() -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    let cfg = ExperimentConfig::defaults(ExperimentKind::StepsVsEpsilon);
    let out = run(&cfg).unwrap();
    for scheme in Scheme::ALL {
        let target = if scheme.order() == 1 { (1.0, 0.1) } else { (0.5, 0.05) };
        let (slope, r2) = slope_of(&out, "steps-vs-epsilon:a=10", scheme, FiniteDifference, "steps");
        c.within(format!("7/{scheme} steps slope"), slope, target.0, target.1);
        c.check(format!("7/{scheme} r2"), r2 >= 0.98, format!("{r2:.4} (want >= 0.98)"));
    }
    c.runtime(7, start.elapsed(), Duration::from_secs(60 * 60));
    c
}

fn criterion_8() -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    for kind in [FiniteDifference, FourierSpectral] {
        let mut c1s = Vec::new();
        let mut c2s = Vec::new();
        for n in (4..=9).map(|k| 1usize << k) {
            let g = grid(n);
            let k = KineticOperator::build(g, kind).unwrap();
            let p = PotentialOperator::build(Potential::one_minus_cos(), g).unwrap();
            let d = DifferenceOperator::for_kinetic(g, kind).unwrap();
            let constants = estimate_assumption_constants(&k, &p, &d, &standard_sample_family(g, 7)).unwrap();
            c1s.push(constants.c1);
            c2s.push(constants.c2);
            if [16, 64, 256].contains(&n) {
                let samples = sample_family(g, 11, 80);
                assert_eq!(samples.len(), 100);
                let cap = exchange_xi_cap(constants.c1, p.norm());
                let worst = [cap, -cap]
                    .iter()
                    .map(|&xi| check_exchange_bound(&k, &p, constants.c1, xi, &samples).unwrap().max_ratio)
                    .fold(0.0, f64::max);
                c.at_most(format!("8/exchange ratio {} n={n}", kind_id(kind)), worst, 2.0);
            }
        }
        let spread = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max) / v.iter().cloned().fold(f64::INFINITY, f64::min);
        c.at_most(format!("8/C1 spread over n {}", kind_id(kind)), spread(&c1s), 2.0);
        c.at_most(format!("8/C2 spread over n {}", kind_id(kind)), spread(&c2s), 2.0);
    }

    let g = grid(8);
    let k = KineticOperator::finite_difference(g);
    let p = PotentialOperator::build(Potential::one_minus_cos(), g).unwrap();
    let h = 1e-2;
    let pair = ControlPreset::OscillatingMass { a: 10.0 }.build(h).unwrap();
    let rep = error_representation_convergence(&pair, &k, &p, h, 64).unwrap();
    c.at_most("8/representation residual n=8 h=1e-2", rep.residual, 1e-8);
    let residuals: Vec<f64> = rep.history.iter().map(|&(_, r)| r).collect();
    let shrinking = residuals.len() >= 2
        && residuals.windows(2).all(|w| w[1] <= w[0] * 1.1)
        && residuals.last() < residuals.first();
    c.check("8/representation residual shrinks with quadrature order", shrinking, format!("{:?}", rep.history));
    c.runtime(8, start.elapsed(), Duration::from_secs(300));
    c
}

fn criterion_9() -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    let profile = SmoothProfile::cosine(2.0 * PI);
    let mut worst = Vec::new();
    for n in [8, 16, 32] {
        let g = SpatialGrid::new(n, 0.0, 1.0).unwrap();
        let s2 = g.scale() * g.scale();
        let bound = (2.0 * PI).powi(4) / (3.0 * s2);
        let stencil_symbol = 2.0 * s2 * (1.0 - (2.0 * PI / n as f64).cos());
        let mut all_within = true;
        let mut max_error = 0.0f64;
        for k in 0..n {
            let r = fd_truncation_error(&profile, &g, k).unwrap();
            // for cos(2πx) the stencil error is |4π² - symbol|·|cos(2πx)|
            let oracle = (4.0 * PI * PI - stencil_symbol).abs() * (2.0 * PI * g.node(k)).cos().abs();
            all_within &= r.within_bound && (r.error - oracle).abs() <= 1e-9 * s2 && oracle <= bound;
            max_error = max_error.max(oracle);
        }
        c.check(format!("9/within bound at every node n={n}"), all_within, format!("max error {max_error:.4e}, bound {bound:.4e}"));
        worst.push(max_error);
    }
    for (i, w) in worst.windows(2).enumerate() {
        c.within(format!("9/halving rate n={}->{}", 8 << i, 16 << i), w[0] / w[1], 4.0, 0.4);
    }
    c.runtime(9, start.elapsed(), Duration::from_secs(1));
    c
}

fn main() {
    // `cargo test -- <filter>` passes arguments; a filter that does not name
    // this target skips it.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let criteria: [(usize, fn() -> Criterion); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut unexpected = Vec::new();
    for (number, f) in criteria {
        let result = f();
        let failed: Vec<&Check> = result.checks.iter().filter(|c| !c.passed).collect();
        let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {number}: {verdict} ({} of {} checks passed)", result.checks.len() - failed.len(), result.checks.len());
        for check in &result.checks {
            let tag = match (check.passed, EXPECTED_FAILURES.contains(&check.id.as_str())) {
                (true, _) => "ok",
                (false, true) => "FAIL (expected)",
                (false, false) => "FAIL",
            };
            println!("    {tag:<15} {}: {}", check.id, check.detail);
            if !check.passed && !EXPECTED_FAILURES.contains(&check.id.as_str()) {
                unexpected.push(check.id.clone());
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected acceptance failures: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
