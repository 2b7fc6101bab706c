//! `trotter bounds`: evaluates the operator-norm error bound for one scheme.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use toml::Value;
use trotter_core::analysis::{BoundsReport, OperatorNorms};
use trotter_core::controls::{ControlNorms, ControlPreset};
use trotter_core::discretization::{KineticDiscretization, KineticOperator, Potential, PotentialOperator, SpatialGrid};
use trotter_core::propagators::Scheme;
use trotter_experiments::PotentialChoice;

use crate::exit::CliError;

/// Accepted keys of the `norms` table.
pub const NORM_KEYS: [&str; 11] = ["f1", "f2", "df1", "df2", "d2f1", "d2f2", "h1", "h2", "c12", "c112", "c221"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub scheme: Scheme,
    pub horizon: f64,
    pub steps: usize,
    /// Model used when `norms` is empty.
    pub preset: String,
    pub a: f64,
    pub c1: f64,
    pub c2: f64,
    pub discretization: KineticDiscretization,
    pub n: usize,
    pub potential: PotentialChoice,
    pub potential_value: f64,
    /// Explicit norms; when given the model is not used.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub norms: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

pub const OPTIONAL_KEYS: &[&str] = &["norms", "output"];

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::G2,
            horizon: 1.0,
            steps: 100,
            preset: "paper-sec7".into(),
            a: 1.0,
            c1: 1.0,
            c2: 1.0,
            discretization: KineticDiscretization::FiniteDifference,
            n: 64,
            potential: PotentialChoice::OneMinusCos,
            potential_value: 1.0,
            norms: BTreeMap::new(),
            output: None,
        }
    }
}

/// Parses `f1=1.5,f2=2,c12=10` into a TOML table value.
pub fn parse_norms(text: &str) -> Result<Value, CliError> {
    let mut table = toml::Table::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("norm '{item}' is not of the form key=value")))?;
        let value: f64 = v.trim().parse().map_err(|_| CliError::config(format!("norm '{item}' has a non-numeric value")))?;
        table.insert(k.trim().to_string(), Value::Float(value));
    }
    Ok(Value::Table(table))
}

fn pair(norms: &BTreeMap<String, f64>, a: &str, b: &str) -> Result<Option<(f64, f64)>, CliError> {
    match (norms.get(a), norms.get(b)) {
        (Some(&x), Some(&y)) => Ok(Some((x, y))),
        (None, None) => Ok(None),
        _ => Err(CliError::config(format!("norms '{a}' and '{b}' must be given together"))),
    }
}

impl BoundsConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(CliError::config(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.steps == 0 {
            return Err(CliError::config("steps must be at least 1"));
        }
        if let Some(k) = self.norms.keys().find(|k| !NORM_KEYS.contains(&k.as_str())) {
            return Err(CliError::config(format!("unknown norm '{k}' (expected one of {})", NORM_KEYS.join(", "))));
        }
        if let Some((k, v)) = self.norms.iter().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
            return Err(CliError::config(format!("norm '{k}' must be non-negative and finite, got {v}")));
        }
        Ok(())
    }

    /// Control and operator norms, from `norms` or computed from the model.
    pub fn inputs(&self) -> Result<(ControlNorms, OperatorNorms), CliError> {
        if !self.norms.is_empty() {
            let value = pair(&self.norms, "f1", "f2")?.ok_or_else(|| CliError::config("norms f1 and f2 are required"))?;
            let controls = ControlNorms {
                value,
                first: pair(&self.norms, "df1", "df2")?,
                second: pair(&self.norms, "d2f1", "d2f2")?,
            };
            let get = |k: &str| self.norms.get(k).copied();
            let ops = OperatorNorms { h1: get("h1"), h2: get("h2"), c12: get("c12"), c112: get("c112"), c221: get("c221") };
            return Ok((controls, ops));
        }
        let params = BTreeMap::from([("a".to_string(), self.a), ("c1".to_string(), self.c1), ("c2".to_string(), self.c2)]);
        let controls = ControlPreset::from_id(&self.preset, &params)?.build(self.horizon)?;
        let grid = SpatialGrid::symmetric_2pi(self.n)?;
        let potential = match self.potential {
            PotentialChoice::OneMinusCos => Potential::one_minus_cos(),
            PotentialChoice::Constant => Potential::constant(self.potential_value),
        };
        let kinetic = KineticOperator::build(grid, self.discretization)?;
        let potential = PotentialOperator::build(potential, grid)?;
        Ok((controls.norms(self.horizon)?, OperatorNorms::compute(&kinetic, &potential)?))
    }
}

pub fn run_bounds(cfg: &BoundsConfig) -> Result<BoundsReport, CliError> {
    cfg.validate()?;
    let (controls, ops) = cfg.inputs()?;
    Ok(BoundsReport::evaluate(cfg.scheme, controls, ops, cfg.horizon, cfg.steps)?)
}
