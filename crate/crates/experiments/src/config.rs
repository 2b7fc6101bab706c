use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use trotter_core::controls::{ControlPair, ControlPreset};
use trotter_core::discretization::{KineticDiscretization, KineticOperator, Potential, PotentialOperator, SpatialGrid};
use trotter_core::propagators::{Scheme, MIN_REFERENCE_TOL};

use crate::error::{config_error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    NormScaling,
    ErrorScaling,
    StepsVsEpsilon,
    OrderStudy,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 4] = [Self::NormScaling, Self::ErrorScaling, Self::StepsVsEpsilon, Self::OrderStudy];

    pub fn id(&self) -> &'static str {
        match self {
            Self::NormScaling => "norm-scaling",
            Self::ErrorScaling => "error-scaling",
            Self::StepsVsEpsilon => "steps-vs-epsilon",
            Self::OrderStudy => "order-study",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Potential `V` sampled on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialChoice {
    /// `1 - cos x`.
    OneMinusCos,
    /// `V ≡ potential_value`.
    Constant,
}

/// One study: what to run and over which grid of parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub discretizations: Vec<KineticDiscretization>,
    /// Control preset id, one of [`ControlPreset::IDS`].
    pub preset: String,
    /// Frequency parameter of the oscillating mass; the study is repeated per value.
    pub a: Vec<f64>,
    /// Constant-preset amplitudes.
    pub c1: f64,
    pub c2: f64,
    pub potential: PotentialChoice,
    pub potential_value: f64,
    /// Final time `T`.
    pub horizon: f64,
    pub n: Vec<usize>,
    /// Step counts `L`.
    pub steps: Vec<usize>,
    /// Target relative errors; paired index-wise with `n` by steps-vs-epsilon.
    pub epsilon: Vec<f64>,
    pub schemes: Vec<Scheme>,
    /// Reference tolerance; each study has its own default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_tol: Option<f64>,
    /// Seed for random sample vectors.
    pub seed: u64,
    /// Worker count; rayon's default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Fill the `walltime_ms` column. Off by default so output is byte-reproducible.
    pub record_walltime: bool,
    /// Base output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn powers_of_two(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|k| 1usize << k).collect()
}

impl ExperimentConfig {
    /// The desk-scale setup of each study.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = Self {
            experiment: kind,
            discretizations: vec![KineticDiscretization::FiniteDifference, KineticDiscretization::FourierSpectral],
            preset: "paper-sec7".into(),
            a: vec![1.0],
            c1: 1.0,
            c2: 1.0,
            potential: PotentialChoice::OneMinusCos,
            potential_value: 1.0,
            horizon: 1e-3,
            n: powers_of_two(4, 9),
            steps: vec![10],
            epsilon: Vec::new(),
            schemes: Scheme::ALL.to_vec(),
            reference_tol: None,
            seed: 20240501,
            threads: None,
            record_walltime: false,
            output: None,
        };
        match kind {
            ExperimentKind::NormScaling => base,
            ExperimentKind::ErrorScaling => Self { a: vec![1.0, 10.0], ..base },
            ExperimentKind::StepsVsEpsilon => Self {
                discretizations: vec![KineticDiscretization::FiniteDifference],
                a: vec![10.0],
                horizon: 0.16,
                n: powers_of_two(5, 10),
                steps: Vec::new(),
                epsilon: (0..6).map(|k| 2f64.powi(-10 - 2 * k)).collect(),
                ..base
            },
            ExperimentKind::OrderStudy => Self {
                discretizations: vec![KineticDiscretization::FiniteDifference],
                a: vec![10.0],
                horizon: 0.1,
                n: vec![64],
                steps: powers_of_two(4, 10),
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonempty = |ok: bool, what: &str| if ok { Ok(()) } else { Err(config_error(format!("'{what}' must not be empty"))) };
        nonempty(!self.discretizations.is_empty(), "discretizations")?;
        nonempty(!self.a.is_empty(), "a")?;
        nonempty(!self.n.is_empty(), "n")?;
        nonempty(!self.schemes.is_empty() || self.experiment == ExperimentKind::NormScaling, "schemes")?;
        if !ControlPreset::IDS.contains(&self.preset.as_str()) {
            return Err(config_error(format!("unknown preset '{}' (expected one of {:?})", self.preset, ControlPreset::IDS)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(config_error(format!("horizon must be positive, got {}", self.horizon)));
        }
        for &n in &self.n {
            if n < 3 {
                return Err(config_error(format!("grid size must be at least 3, got {n}")));
            }
            if n % 2 != 0 && self.discretizations.contains(&KineticDiscretization::FourierSpectral) {
                return Err(config_error(format!("spectral discretization needs even n, got {n}")));
            }
        }
        if self.steps.contains(&0) {
            return Err(config_error("step counts must be at least 1"));
        }
        if let Some(e) = self.epsilon.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(config_error(format!("epsilon values must lie in (0, 1), got {e}")));
        }
        if let Some(tol) = self.reference_tol {
            if !(tol >= MIN_REFERENCE_TOL) {
                return Err(config_error(format!("reference_tol must be at least {MIN_REFERENCE_TOL:e}, got {tol:e}")));
            }
        }
        if self.threads == Some(0) {
            return Err(config_error("threads must be at least 1"));
        }
        if !self.a.iter().chain([&self.c1, &self.c2, &self.potential_value]).all(|v| v.is_finite()) {
            return Err(config_error("control and potential parameters must be finite"));
        }
        match self.experiment {
            ExperimentKind::ErrorScaling | ExperimentKind::OrderStudy => nonempty(!self.steps.is_empty(), "steps")?,
            ExperimentKind::StepsVsEpsilon => {
                nonempty(!self.epsilon.is_empty(), "epsilon")?;
                if self.epsilon.len() != self.n.len() {
                    return Err(config_error(format!(
                        "steps-vs-epsilon pairs epsilon with n index-wise: {} epsilon values but {} grid sizes",
                        self.epsilon.len(),
                        self.n.len()
                    )));
                }
            }
            ExperimentKind::NormScaling => {}
        }
        Ok(())
    }

    /// Controls for one value of `a` on `[0, horizon]`.
    pub fn controls(&self, a: f64) -> Result<ControlPair> {
        let params = BTreeMap::from([("a".to_string(), a), ("c1".to_string(), self.c1), ("c2".to_string(), self.c2)]);
        Ok(ControlPreset::from_id(&self.preset, &params)?.build(self.horizon)?)
    }

    pub fn potential(&self) -> Potential {
        match self.potential {
            PotentialChoice::OneMinusCos => Potential::one_minus_cos(),
            PotentialChoice::Constant => Potential::constant(self.potential_value),
        }
    }

    /// Operators on the standard `[-π, π)` grid.
    pub fn operators(&self, kind: KineticDiscretization, n: usize) -> Result<(KineticOperator, PotentialOperator)> {
        let grid = SpatialGrid::symmetric_2pi(n)?;
        Ok((KineticOperator::build(grid, kind)?, PotentialOperator::build(self.potential(), grid)?))
    }

    /// Label of the experiment column; studies swept over `a` carry its value
    /// unless the preset ignores it.
    pub(crate) fn label(&self, a: Option<f64>) -> String {
        match a {
            Some(a) if self.preset != "constant" || self.a.len() > 1 => format!("{}:a={a}", self.experiment),
            _ => self.experiment.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for kind in ExperimentKind::ALL {
            ExperimentConfig::defaults(kind).validate().unwrap();
        }
        let c = ExperimentConfig::defaults(ExperimentKind::StepsVsEpsilon);
        assert_eq!(c.n, vec![32, 64, 128, 256, 512, 1024]);
        assert_eq!(c.epsilon[5], 2f64.powi(-20));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = ExperimentConfig::defaults(ExperimentKind::StepsVsEpsilon);
        c.epsilon[0] = 1.5;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(ExperimentKind::StepsVsEpsilon);
        c.n.pop();
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(ExperimentKind::NormScaling);
        c.n = vec![];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(ExperimentKind::NormScaling);
        c.n = vec![15];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(ExperimentKind::ErrorScaling);
        c.preset = "sawtooth".into();
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(ExperimentKind::ErrorScaling);
        c.reference_tol = Some(1e-15);
        assert!(c.validate().is_err());
    }

    #[test]
    fn serde_round_trip_rejects_unknown_keys() {
        let c = ExperimentConfig::defaults(ExperimentKind::OrderStudy);
        let json = serde_json::to_value(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_value(json.clone()).unwrap();
        assert_eq!(back, c);
        let mut bad = json;
        bad["colour"] = serde_json::json!("red");
        assert!(serde_json::from_value::<ExperimentConfig>(bad).is_err());
        let short: ExperimentConfig = serde_json::from_value(serde_json::json!({
            "experiment": "norm-scaling", "discretizations": ["fd", "spectral"], "preset": "constant",
            "a": [1.0], "c1": 1.0, "c2": 1.0, "potential": "constant", "potential_value": 2.0, "horizon": 1.0,
            "n": [8], "steps": [], "epsilon": [], "schemes": [], "seed": 1, "record_walltime": false
        }))
        .unwrap();
        assert_eq!(short.discretizations[1], KineticDiscretization::FourierSpectral);
    }
}
