//! Scalar quadrature and maximization helpers.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Default absolute tolerance for adaptive integration.
pub const QUADRATURE_TOL: f64 = 1e-13;

const PANEL_POINTS: usize = 15;
const MAX_PANELS: usize = 20_000;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
///
/// Nodes are found by Newton iteration on the Legendre recurrence and are
/// returned in increasing order.
pub fn gauss_legendre(points: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(points >= 1, "at least one quadrature point required");
    let mut nodes = vec![0.0; points];
    let mut weights = vec![0.0; points];
    let m = points.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (points as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(points, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(points, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[points - 1 - i] = x;
        weights[i] = w;
        weights[points - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_POINTS))
}

/// Fixed-order Gauss–Legendre sum of `f` over `[a, b]`.
pub fn gauss_legendre_fixed<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, points: usize) -> f64 {
    let (x, w) = gauss_legendre(points);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter().zip(&w).map(|(xi, wi)| wi * f(mid + half * xi)).sum::<f64>() * half
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let (x, w) = panel_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    let mut abs = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        let v = wi * f(mid + half * xi);
        sum += v;
        abs += v.abs();
    }
    (sum * half, abs * half.abs())
}

/// Adaptive Gauss–Legendre integration of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Each panel is compared with the sum over its two halves; panels are split
/// until the difference is below the panel's share of the tolerance or at the
/// roundoff level of the panel sum.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let total = (b - a).abs();
    let mut stack = vec![(a, b, panel(&f, a, b))];
    let mut result = 0.0;
    let mut err_est = 0.0;
    let mut panels = 0usize;
    while let Some((lo, hi, (whole, _))) = stack.pop() {
        panels += 1;
        let mid = 0.5 * (lo + hi);
        let left = panel(&f, lo, mid);
        let right = panel(&f, mid, hi);
        let refined = left.0 + right.0;
        let diff = (refined - whole).abs();
        if !diff.is_finite() {
            return Err(Error::Accuracy {
                what: "quadrature produced a non-finite value".into(),
                achieved: f64::NAN,
            });
        }
        let share = tol * (hi - lo).abs() / total;
        let roundoff = 64.0 * f64::EPSILON * (left.1 + right.1);
        if diff <= share.max(roundoff) || (hi - lo).abs() <= 1e-14 * total {
            result += refined;
            err_est += diff;
            continue;
        }
        if panels > MAX_PANELS {
            let pending: f64 = stack.iter().map(|s| s.2 .0).sum::<f64>() + refined;
            return Err(Error::Accuracy {
                what: format!("adaptive quadrature did not converge, estimate {}", result + pending),
                achieved: err_est + diff,
            });
        }
        stack.push((lo, mid, left));
        stack.push((mid, hi, right));
    }
    Ok(result)
}

/// Maximizes `g` over `[a, b]` from `samples + 1` equispaced samples, polishing the
/// best few local maxima by golden-section search.
pub fn maximize_sampled<F: Fn(f64) -> f64>(g: F, a: f64, b: f64, samples: usize) -> f64 {
    if b <= a {
        return g(a);
    }
    let samples = samples.max(2);
    let dt = (b - a) / samples as f64;
    let values: Vec<f64> = (0..=samples).map(|i| g(a + dt * i as f64)).collect();
    let mut best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let mut peaks: Vec<usize> = (0..=samples)
        .filter(|&i| {
            let left = if i == 0 { f64::NEG_INFINITY } else { values[i - 1] };
            let right = if i == samples { f64::NEG_INFINITY } else { values[i + 1] };
            values[i] >= left && values[i] >= right
        })
        .collect();
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    for &i in peaks.iter().take(8) {
        let lo = a + dt * i.saturating_sub(1) as f64;
        let hi = (a + dt * (i + 1) as f64).min(b);
        best = best.max(golden_section_max(&g, lo, hi, 1e-13 * (b - a).max(1.0)));
    }
    best
}

/// Golden-section search for a maximum of a unimodal `g` on `[lo, hi]`.
pub fn golden_section_max<F: Fn(f64) -> f64>(g: &F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    let mut best = g(lo).max(g(hi)).max(g1).max(g2);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if g1 < g2 {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + ratio * (hi - lo);
            g2 = g(x2);
            best = best.max(g2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - ratio * (hi - lo);
            g1 = g(x1);
            best = best.max(g1);
        }
    }
    best
}
