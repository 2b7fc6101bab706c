use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported derivative order {order} (declared smoothness {smoothness})")]
    UnsupportedDerivative { order: usize, smoothness: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("accuracy error: {what} (achieved {achieved:e})")]
    Accuracy { what: String, achieved: f64 },

    #[error("construction error: {0}")]
    Construction(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dense cap exceeded: n = {n} > {cap}")]
    DenseCap { n: usize, cap: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn construction(msg: impl Into<String>) -> Self {
        Error::Construction(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
