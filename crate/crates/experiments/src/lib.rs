//! Convergence and scaling studies built on `trotter-core`.
//!
//! Each study takes an [`ExperimentConfig`], evaluates its grid of points in a
//! work pool, and returns an [`ExperimentOutput`] holding measurement rows and
//! fitted log-log slopes.

pub mod config;
pub mod error;
pub mod error_scaling;
pub mod fit;
pub mod norm_scaling;
pub mod order_study;
pub mod output;
mod pool;
pub mod steps_vs_epsilon;
pub mod verify;

pub use config::{ExperimentConfig, ExperimentKind, PotentialChoice};
pub use error::{ExperimentError, Result};
pub use error_scaling::run_error_scaling;
pub use fit::{fit_loglog_slope, SlopeFit};
pub use norm_scaling::run_norm_scaling;
pub use order_study::run_order_study;
pub use output::{ExperimentOutput, ResultRow, SlopeSummary, CSV_HEADER, MIN_R2};
pub use steps_vs_epsilon::{find_min_steps, run_steps_vs_epsilon, StepSearch, MAX_SEARCH_STEPS};

/// Runs the study named by `cfg.experiment`.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::NormScaling => run_norm_scaling(cfg),
        ExperimentKind::ErrorScaling => run_error_scaling(cfg),
        ExperimentKind::StepsVsEpsilon => run_steps_vs_epsilon(cfg),
        ExperimentKind::OrderStudy => run_order_study(cfg),
    }
}
