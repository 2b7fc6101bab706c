use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use trotter_core::discretization::KineticDiscretization;
use trotter_core::propagators::Scheme;

use crate::error::Result;
use crate::fit::{fit_loglog_slope, SlopeFit};

pub const CSV_HEADER: [&str; 10] =
    ["experiment", "scheme", "discretization", "n", "L", "epsilon", "quantity", "value", "r2", "walltime_ms"];

/// Fits with a lower coefficient of determination are flagged.
pub const MIN_R2: f64 = 0.98;

/// One measurement, or one fitted slope when `r2` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub scheme: Option<Scheme>,
    pub discretization: Option<KineticDiscretization>,
    pub n: Option<usize>,
    pub steps: Option<usize>,
    pub epsilon: Option<f64>,
    pub quantity: String,
    pub value: f64,
    pub r2: Option<f64>,
    pub walltime_ms: Option<f64>,
}

impl ResultRow {
    /// A measured quantity, which must be finite and non-negative.
    pub fn measurement(
        experiment: &str,
        scheme: Option<Scheme>,
        discretization: Option<KineticDiscretization>,
        quantity: &str,
        value: f64,
    ) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(trotter_core::Error::NonFinite(format!("{experiment}/{quantity} measured {value}")).into());
        }
        Ok(Self {
            experiment: experiment.into(),
            scheme,
            discretization,
            n: None,
            steps: None,
            epsilon: None,
            quantity: quantity.into(),
            value,
            r2: None,
            walltime_ms: None,
        })
    }

    pub fn at_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn at_steps(mut self, steps: usize) -> Self {
        self.steps = Some(steps);
        self
    }

    pub fn at_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn timed(mut self, walltime_ms: Option<f64>) -> Self {
        self.walltime_ms = walltime_ms;
        self
    }

    fn csv_record(&self) -> [String; 10] {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(ToString::to_string).unwrap_or_default()
        }
        [
            self.experiment.clone(),
            self.scheme.map(|s| s.id().to_string()).unwrap_or_default(),
            self.discretization.map(|d| d.id().to_string()).unwrap_or_default(),
            opt(&self.n),
            opt(&self.steps),
            opt(&self.epsilon),
            self.quantity.clone(),
            self.value.to_string(),
            opt(&self.r2),
            opt(&self.walltime_ms),
        ]
    }
}

/// A fitted log-log slope of `quantity` against the swept variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeSummary {
    pub experiment: String,
    pub scheme: Option<Scheme>,
    pub discretization: Option<KineticDiscretization>,
    pub quantity: String,
    /// Swept variable: `n`, `L` or `1/epsilon`.
    pub against: String,
    /// Fixed grid size of the series, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Fixed step count of the series, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
    /// `r2 < MIN_R2`.
    pub flagged: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub slopes: Vec<SlopeSummary>,
}

impl ExperimentOutput {
    /// Fits `points` and records the slope both as a summary and as a CSV row
    /// with quantity `slope(<quantity>)`. `against` names the swept variable
    /// (`n`, `L` or `1/epsilon`), whose column is left empty on the slope row.
    /// Series with fewer than three points or a non-positive value are skipped.
    pub fn add_slope(
        &mut self,
        template: &ResultRow,
        against: &str,
        points: &[(f64, f64)],
    ) -> Option<SlopeFit> {
        let fit = fit_loglog_slope(points).ok()?;
        let mut row = template.clone();
        match against {
            "n" => row.n = None,
            "L" => row.steps = None,
            _ => {
                row.n = None;
                row.steps = None;
            }
        }
        row.epsilon = None;
        self.slopes.push(SlopeSummary {
            experiment: template.experiment.clone(),
            scheme: template.scheme,
            discretization: template.discretization,
            quantity: template.quantity.clone(),
            against: against.into(),
            n: row.n,
            steps: row.steps,
            slope: fit.slope,
            intercept: fit.intercept,
            r2: fit.r2,
            points: fit.points,
            flagged: fit.r2 < MIN_R2,
        });
        self.rows.push(ResultRow {
            quantity: format!("slope({})", template.quantity),
            value: fit.slope,
            r2: Some(fit.r2),
            walltime_ms: None,
            ..row
        });
        Some(fit)
    }

    /// Looks up a fitted slope.
    pub fn slope(
        &self,
        experiment: &str,
        scheme: Option<Scheme>,
        discretization: Option<KineticDiscretization>,
        quantity: &str,
    ) -> Option<&SlopeSummary> {
        self.slopes.iter().find(|s| {
            s.experiment == experiment && s.scheme == scheme && s.discretization == discretization && s.quantity == quantity
        })
    }

    /// Measurement rows matching the filters, in output order.
    pub fn measurements<'a>(
        &'a self,
        experiment: &'a str,
        scheme: Option<Scheme>,
        discretization: Option<KineticDiscretization>,
        quantity: &'a str,
    ) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| {
            r.r2.is_none()
                && r.experiment == experiment
                && r.scheme == scheme
                && r.discretization == discretization
                && r.quantity == quantity
        })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CSV_HEADER)?;
        for row in &self.rows {
            w.write_record(row.csv_record())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    /// JSON summary of the fitted slopes.
    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&serde_json::json!({ "slopes": self.slopes }))?)
    }

    pub fn extend(&mut self, other: ExperimentOutput) {
        self.rows.extend(other.rows);
        self.slopes.extend(other.slopes);
    }
}
