//! Scalar control functions `f1`, `f2` with derivative access, integrals and sup-norms.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_adaptive, maximize_sampled, QUADRATURE_TOL};

/// Thread-safe scalar function of time.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Thread-safe `(a, b) ↦ ∫_a^b f`.
pub type IntervalFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Default number of samples for sup-norm evaluation.
pub const SUP_NORM_SAMPLES: usize = 10_000;

/// Relative slack allowed when checking that a time lies in `[0, T]`.
const HORIZON_SLACK: f64 = 1e-10;

/// A scalar control `f(t)` on `[0, T]` with its first two derivatives.
#[derive(Clone)]
pub struct ControlFunction {
    name: String,
    derivatives: [ScalarFn; 3],
    antiderivative: Option<ScalarFn>,
    interval_integral: Option<IntervalFn>,
    params: BTreeMap<String, f64>,
    smoothness: usize,
    horizon: f64,
}

impl fmt::Debug for ControlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlFunction")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("smoothness", &self.smoothness)
            .field("horizon", &self.horizon)
            .field("closed_form_integral", &self.has_closed_form_integral())
            .finish()
    }
}

impl ControlFunction {
    /// Builds a control from `f`, `f'` and `f''` on `[0, horizon]`. Smoothness defaults to 2.
    pub fn new<F, D1, D2>(name: impl Into<String>, horizon: f64, f: F, df: D1, d2f: D2) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D1: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::invalid(format!("control horizon must be positive, got {horizon}")));
        }
        Ok(Self {
            name: name.into(),
            derivatives: [Arc::new(f), Arc::new(df), Arc::new(d2f)],
            antiderivative: None,
            interval_integral: None,
            params: BTreeMap::new(),
            smoothness: 2,
            horizon,
        })
    }

    /// Constant control `f(t) = c`.
    pub fn constant(c: f64, horizon: f64) -> Result<Self> {
        Ok(Self::new("constant", horizon, move |_| c, |_| 0.0, |_| 0.0)?
            .with_antiderivative(move |t| c * t)
            .with_interval_integral(move |a, b| c * (b - a))
            .with_smoothness(usize::MAX)
            .with_param("c", c))
    }

    /// Attaches a closed-form antiderivative used by [`integrate`](Self::integrate).
    pub fn with_antiderivative<F>(mut self, antiderivative: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.antiderivative = Some(Arc::new(antiderivative));
        self
    }

    /// Attaches a closed form for `∫_a^b f` that avoids cancellation on short intervals.
    pub fn with_interval_integral<F>(mut self, integral: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.interval_integral = Some(Arc::new(integral));
        self
    }

    pub fn with_param(mut self, key: impl Into<String>, value: f64) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    pub fn with_smoothness(mut self, smoothness: usize) -> Self {
        self.smoothness = smoothness;
        self
    }

    /// Same control on a different horizon.
    pub fn with_horizon(mut self, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::invalid(format!("control horizon must be positive, got {horizon}")));
        }
        self.horizon = horizon;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn smoothness(&self) -> usize {
        self.smoothness
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn has_closed_form_integral(&self) -> bool {
        self.antiderivative.is_some() || self.interval_integral.is_some()
    }

    fn check_time(&self, t: f64) -> Result<f64> {
        let slack = HORIZON_SLACK * self.horizon.max(1.0);
        if !t.is_finite() || t < -slack || t > self.horizon + slack {
            return Err(Error::domain(format!(
                "t = {t} outside [0, {}] for control '{}'",
                self.horizon, self.name
            )));
        }
        Ok(t.clamp(0.0, self.horizon))
    }

    /// Evaluates `f^(order)(t)`.
    pub fn eval(&self, t: f64, order: usize) -> Result<f64> {
        let supported = self.smoothness.min(2);
        if order > supported {
            return Err(Error::UnsupportedDerivative { order, smoothness: supported });
        }
        let t = self.check_time(t)?;
        Ok((self.derivatives[order])(t))
    }

    /// Evaluates `f^(order)(t)` without domain checks.
    pub fn eval_unchecked(&self, t: f64, order: usize) -> f64 {
        (self.derivatives[order.min(2)])(t)
    }

    /// `∫_a^b f(s) ds` by closed form when available, adaptive Gauss–Legendre otherwise.
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64> {
        let a = self.check_time(a)?;
        let b = self.check_time(b)?;
        if a > b {
            return Err(Error::domain(format!("integration bounds reversed: [{a}, {b}]")));
        }
        if a == b {
            return Ok(0.0);
        }
        if let Some(integral) = &self.interval_integral {
            return Ok(integral(a, b));
        }
        match &self.antiderivative {
            Some(anti) => Ok(anti(b) - anti(a)),
            None => self.integrate_numerically(a, b),
        }
    }

    /// Adaptive quadrature of `f` regardless of any closed form.
    pub fn integrate_numerically(&self, a: f64, b: f64) -> Result<f64> {
        let f = &self.derivatives[0];
        integrate_adaptive(|s| f(s), a, b, QUADRATURE_TOL)
    }

    /// `sup_{t ∈ [0, T]} |f^(order)(t)|` from dense sampling plus golden-section polish.
    pub fn sup_norm(&self, order: usize, horizon: f64) -> Result<f64> {
        if !(horizon > 0.0) {
            return Err(Error::invalid(format!("sup-norm horizon must be positive, got {horizon}")));
        }
        self.eval(0.0, order)?;
        self.check_time(horizon)?;
        let g = &self.derivatives[order];
        let value = maximize_sampled(|t| g(t).abs(), 0.0, horizon.min(self.horizon), SUP_NORM_SAMPLES);
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("sup-norm of control '{}'", self.name)));
        }
        Ok(value)
    }

    /// The time-reflected control `t ↦ f(T - t)`.
    pub fn reflected(&self) -> Self {
        let horizon = self.horizon;
        let [f, df, d2f] = self.derivatives.clone();
        let anti = self.antiderivative.clone();
        let interval = self.interval_integral.clone();
        Self {
            name: format!("{}-reflected", self.name),
            derivatives: [
                Arc::new(move |t| f(horizon - t)),
                Arc::new(move |t| -df(horizon - t)),
                Arc::new(move |t| d2f(horizon - t)),
            ],
            antiderivative: anti.map(|anti| -> ScalarFn { Arc::new(move |t| -anti(horizon - t)) }),
            interval_integral: interval
                .map(|integral| -> IntervalFn { Arc::new(move |a, b| integral(horizon - b, horizon - a)) }),
            params: self.params.clone(),
            smoothness: self.smoothness,
            horizon,
        }
    }
}

/// Sup-norms of a control pair and its derivatives on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlNorms {
    /// `(‖f1‖, ‖f2‖)`.
    pub value: (f64, f64),
    /// `(‖f1'‖, ‖f2'‖)`.
    pub first: Option<(f64, f64)>,
    /// `(‖f1''‖, ‖f2''‖)`.
    pub second: Option<(f64, f64)>,
}

/// The two controls multiplying `H1` and `H2`.
#[derive(Debug, Clone)]
pub struct ControlPair {
    pub f1: ControlFunction,
    pub f2: ControlFunction,
    horizon: f64,
}

impl ControlPair {
    pub fn new(f1: ControlFunction, f2: ControlFunction) -> Result<Self> {
        let horizon = f1.horizon().min(f2.horizon());
        if !(horizon > 0.0) {
            return Err(Error::invalid("control horizon must be positive"));
        }
        Ok(Self { f1, f2, horizon })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Same pair on horizon `T`.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::new(self.f1.clone().with_horizon(horizon)?, self.f2.clone().with_horizon(horizon)?)
    }

    /// Sup-norms of orders 0..=2 over `[0, T]`.
    pub fn norms(&self, horizon: f64) -> Result<ControlNorms> {
        let both = |k| -> Result<(f64, f64)> { Ok((self.f1.sup_norm(k, horizon)?, self.f2.sup_norm(k, horizon)?)) };
        Ok(ControlNorms { value: both(0)?, first: Some(both(1)?), second: Some(both(2)?) })
    }

    /// Controls reflected in time, `t ↦ f(T - t)`.
    pub fn reflected(&self) -> Self {
        Self { f1: self.f1.reflected(), f2: self.f2.reflected(), horizon: self.horizon }
    }
}

/// Named control presets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case")]
pub enum ControlPreset {
    /// `f1 = (2 + sin(a t + 0.5)) / 2`, `f2 = 1 + cos t`.
    #[serde(rename = "paper-sec7")]
    OscillatingMass { a: f64 },
    /// `f1 = c1`, `f2 = c2`.
    Constant { c1: f64, c2: f64 },
    /// `f1 = (2 + sin(a t + 0.5)) / 2`, `f2 = 0`.
    ZeroPotential { a: f64 },
}

impl ControlPreset {
    pub const IDS: [&'static str; 3] = ["paper-sec7", "constant", "zero-potential"];

    /// Looks up a preset by id; parameters not given take their defaults (`a = 1`, `c1 = c2 = 1`).
    pub fn from_id(id: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |k: &str, default: f64| params.get(k).copied().unwrap_or(default);
        match id {
            "paper-sec7" => Ok(Self::OscillatingMass { a: get("a", 1.0) }),
            "constant" => Ok(Self::Constant { c1: get("c1", 1.0), c2: get("c2", 1.0) }),
            "zero-potential" => Ok(Self::ZeroPotential { a: get("a", 1.0) }),
            other => Err(Error::invalid(format!(
                "unknown control preset '{other}' (expected one of {})",
                Self::IDS.join(", ")
            ))),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Self::OscillatingMass { .. } => "paper-sec7",
            Self::Constant { .. } => "constant",
            Self::ZeroPotential { .. } => "zero-potential",
        }
    }

    /// Builds the control pair on `[0, T]`.
    pub fn build(&self, horizon: f64) -> Result<ControlPair> {
        match *self {
            Self::OscillatingMass { a } => ControlPair::new(oscillating_mass(a, horizon)?, one_plus_cos(horizon)?),
            Self::Constant { c1, c2 } => {
                ControlPair::new(ControlFunction::constant(c1, horizon)?, ControlFunction::constant(c2, horizon)?)
            }
            Self::ZeroPotential { a } => {
                ControlPair::new(oscillating_mass(a, horizon)?, ControlFunction::constant(0.0, horizon)?)
            }
        }
    }
}

/// `f(t) = (2 + sin(a t + 0.5)) / 2`.
pub fn oscillating_mass(a: f64, horizon: f64) -> Result<ControlFunction> {
    let f = ControlFunction::new(
        "oscillating-mass",
        horizon,
        move |t| (2.0 + (a * t + 0.5).sin()) / 2.0,
        move |t| 0.5 * a * (a * t + 0.5).cos(),
        move |t| -0.5 * a * a * (a * t + 0.5).sin(),
    )?
    .with_smoothness(usize::MAX)
    .with_param("a", a);
    Ok(if a != 0.0 {
        f.with_antiderivative(move |t| t - (a * t + 0.5).cos() / (2.0 * a))
            .with_interval_integral(move |lo, hi| {
                let half = 0.5 * (hi - lo);
                (hi - lo) + (a * (lo + half) + 0.5).sin() * (a * half).sin() / a
            })
    } else {
        let c = (2.0 + 0.5f64.sin()) / 2.0;
        f.with_antiderivative(move |t| c * t).with_interval_integral(move |lo, hi| c * (hi - lo))
    })
}

/// `f(t) = 1 + cos t`.
pub fn one_plus_cos(horizon: f64) -> Result<ControlFunction> {
    Ok(ControlFunction::new("one-plus-cos", horizon, |t| 1.0 + t.cos(), |t| -t.sin(), |t| -t.cos())?
        .with_smoothness(usize::MAX)
        .with_antiderivative(|t| t + t.sin())
        .with_interval_integral(|lo, hi| {
            let half = 0.5 * (hi - lo);
            (hi - lo) + 2.0 * (lo + half).cos() * half.sin()
        }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn sec7(a: f64, horizon: f64) -> ControlPair {
        ControlPreset::OscillatingMass { a }.build(horizon).unwrap()
    }

    #[test]
    fn eval_examples() {
        let p = sec7(1.0, 1.0);
        assert_eq!(p.f2.eval(0.0, 0).unwrap(), 2.0);
        assert_eq!(p.f2.eval(0.0, 1).unwrap(), 0.0);
        let oracle = (2.0 + 0.5f64.sin()) / 2.0;
        assert_abs_diff_eq!(p.f1.eval(0.0, 0).unwrap(), oracle, epsilon = 1e-15);
        assert_abs_diff_eq!(oracle, 1.2397128, epsilon = 1e-7);
    }

    #[test]
    fn eval_errors() {
        let f = ControlFunction::new("x", 1.0, |t| t, |_| 1.0, |_| 0.0).unwrap().with_smoothness(1);
        assert_eq!(f.eval(0.5, 2).unwrap_err(), Error::UnsupportedDerivative { order: 2, smoothness: 1 });
        assert!(matches!(f.eval(1.5, 0), Err(Error::Domain(_))));
        assert!(matches!(f.eval(-0.1, 0), Err(Error::Domain(_))));
        let g = ControlFunction::constant(1.0, 1.0).unwrap();
        assert!(matches!(g.eval(0.0, 3), Err(Error::UnsupportedDerivative { .. })));
    }

    #[test]
    fn integrate_examples() {
        let p = sec7(1.0, 1.0);
        let h = 0.1f64;
        assert_abs_diff_eq!(p.f2.integrate(0.0, h).unwrap(), h + h.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.f2.integrate(0.0, 0.1).unwrap(), 0.19983342, epsilon = 1e-8);
        assert_eq!(p.f1.integrate(0.3, 0.3).unwrap(), 0.0);
        let c = ControlFunction::constant(2.5, 3.0).unwrap();
        assert_abs_diff_eq!(c.integrate(0.5, 2.0).unwrap(), 2.5 * 1.5, epsilon = 1e-15);
        assert!(p.f1.integrate(0.5, 0.2).is_err());
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for a in [1.0, 10.0, 37.0] {
            let p = sec7(a, 2.0);
            for (lo, hi) in [(0.0, 2.0), (0.3, 0.31), (1.1, 1.9)] {
                let exact = p.f1.integrate(lo, hi).unwrap();
                assert_abs_diff_eq!(p.f1.integrate_numerically(lo, hi).unwrap(), exact, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn interval_integrals_match_antiderivatives() {
        for a in [0.0, 1.0, 10.0] {
            let p = sec7(a, 1.0);
            for f in [&p.f1, &p.f2] {
                for (lo, hi) in [(0.0, 1.0), (0.25, 0.2500001), (0.7, 0.9)] {
                    let numeric = f.integrate_numerically(lo, hi).unwrap();
                    assert_abs_diff_eq!(f.integrate(lo, hi).unwrap(), numeric, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn sup_norm_examples() {
        let p = sec7(1.0, 2.0 * std::f64::consts::PI);
        assert_relative_eq!(p.f2.sup_norm(0, 2.0 * std::f64::consts::PI).unwrap(), 2.0, max_relative = 1e-12);
        let c = ControlFunction::constant(3.0, 1.0).unwrap();
        assert_eq!(c.sup_norm(1, 1.0).unwrap(), 0.0);
        assert_eq!(c.sup_norm(2, 1.0).unwrap(), 0.0);
        // a = 10, T = 0.16: 10t + 0.5 sweeps [0.5, 2.1], which contains pi/2, so |f1''| peaks at a^2/2.
        let p = sec7(10.0, 0.16);
        let oracle = maximize_sampled(|t: f64| 50.0 * (10.0 * t + 0.5).sin().abs(), 0.0, 0.16, 200_000);
        assert_relative_eq!(p.f1.sup_norm(2, 0.16).unwrap(), oracle, max_relative = 1e-6);
        assert_relative_eq!(oracle, 50.0, max_relative = 1e-9);
    }

    #[test]
    fn preset_ids_roundtrip() {
        let params = BTreeMap::from([("a".to_string(), 10.0)]);
        for id in ControlPreset::IDS {
            assert_eq!(ControlPreset::from_id(id, &params).unwrap().id(), id);
        }
        assert!(ControlPreset::from_id("nope", &params).is_err());
        let zero = ControlPreset::ZeroPotential { a: 2.0 }.build(1.0).unwrap();
        assert_eq!(zero.f2.sup_norm(0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn reflected_control() {
        let p = sec7(3.0, 1.0);
        let r = p.f1.reflected();
        assert_abs_diff_eq!(r.eval(0.2, 0).unwrap(), p.f1.eval(0.8, 0).unwrap(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.eval(0.2, 1).unwrap(), -p.f1.eval(0.8, 1).unwrap(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.integrate(0.1, 0.4).unwrap(), p.f1.integrate(0.6, 0.9).unwrap(), epsilon = 1e-14);
    }

    #[test]
    fn derivative_scaling_in_frequency() {
        // once T >= 2 pi / a the sup-norms of f1', f1'' are a/2 and a^2/2
        let horizon = 2.0;
        let a_values: [f64; 4] = [4.0, 8.0, 16.0, 32.0];
        let logs = |order| -> Vec<(f64, f64)> {
            a_values.iter().map(|&a| (a.ln(), sec7(a, horizon).f1.sup_norm(order, horizon).unwrap().ln())).collect()
        };
        for (order, expected) in [(1, 1.0), (2, 2.0)] {
            let pts = logs(order);
            let slope = (pts[3].1 - pts[0].1) / (pts[3].0 - pts[0].0);
            assert!((slope - expected).abs() <= 0.05 * expected, "order {order}: slope {slope}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn derivatives_match_central_differences(a in 0.5f64..20.0, t in 0.01f64..0.99) {
            let p = sec7(a, 1.0);
            let step = 1e-5;
            for f in [&p.f1, &p.f2] {
                for order in 0..2 {
                    let fd = (f.eval(t + step, order).unwrap() - f.eval(t - step, order).unwrap()) / (2.0 * step);
                    let exact = f.eval(t, order + 1).unwrap();
                    prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0));
                }
            }
        }

        #[test]
        fn integral_is_additive(a in 0.5f64..20.0, x in 0.0f64..1.0, y in 0.0f64..1.0, z in 0.0f64..1.0) {
            let mut v = [x, y, z];
            v.sort_by(f64::total_cmp);
            let f = sec7(a, 1.0).f1;
            let whole = f.integrate_numerically(v[0], v[2]).unwrap();
            let parts = f.integrate_numerically(v[0], v[1]).unwrap() + f.integrate_numerically(v[1], v[2]).unwrap();
            prop_assert!((whole - parts).abs() <= 1e-12);
            prop_assert!((whole - f.integrate(v[0], v[2]).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn sup_norm_monotone_in_horizon(a in 0.5f64..20.0, t1 in 0.01f64..1.0, t2 in 0.01f64..1.0, order in 0usize..3) {
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let f = sec7(a, 1.0).f1;
            prop_assert!(f.sup_norm(order, lo).unwrap() <= f.sup_norm(order, hi).unwrap() * (1.0 + 1e-12));
        }
    }
}
