use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Core(#[from] trotter_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("slope fit: {0}")]
    Fit(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

pub(crate) fn config_error(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}
