//! Exit codes and the one-line error report.

use std::fmt;

use trotter_core::Error as CoreError;
use trotter_experiments::ExperimentError;

pub const EXIT_OK: i32 = 0;
/// A check of `verify` failed, or an output file could not be written.
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: EXIT_CONFIG, kind: "config", message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { code: EXIT_FAILURE, kind: "io", message: message.into() }
    }

    pub fn failed(message: impl Into<String>) -> Self {
        Self { code: EXIT_FAILURE, kind: "check-failed", message: message.into() }
    }

    /// `error kind=<kind> code=<code> message="<message>"` on a single line.
    pub fn report_line(&self) -> String {
        let flat = self.message.replace(['\n', '\r'], " ").replace('"', "'");
        format!("error kind={} code={} message=\"{}\"", self.kind, self.code, flat)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let (code, kind) = match &e {
            CoreError::Accuracy { .. } | CoreError::NonFinite(_) => (EXIT_NONCONVERGENCE, "non-convergence"),
            CoreError::DenseCap { .. } => (EXIT_RESOURCE, "resource-cap"),
            _ => (EXIT_CONFIG, "config"),
        };
        Self { code, kind, message: e.to_string() }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Core(c) => c.into(),
            ExperimentError::Config(m) => Self::config(m),
            ExperimentError::Fit(m) => Self { code: EXIT_NONCONVERGENCE, kind: "fit", message: m },
            ExperimentError::Io(e) => Self::io(e.to_string()),
            ExperimentError::Csv(e) => Self::io(e.to_string()),
            ExperimentError::Json(e) => Self::io(e.to_string()),
            ExperimentError::Pool(m) => Self { code: EXIT_RESOURCE, kind: "resource-cap", message: m },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        let e: CliError = CoreError::DenseCap { n: 5000, cap: 4096 }.into();
        assert_eq!(e.code, EXIT_RESOURCE);
        let e: CliError = CoreError::Accuracy { what: "x".into(), achieved: 1.0 }.into();
        assert_eq!(e.code, EXIT_NONCONVERGENCE);
        let e: CliError = ExperimentError::Config("bad".into()).into();
        assert_eq!(e.code, EXIT_CONFIG);
        assert_eq!(CliError::config("a\nb \"c\"").report_line(), "error kind=config code=2 message=\"a b 'c'\"");
    }
}
