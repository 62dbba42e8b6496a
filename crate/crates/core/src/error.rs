use thiserror::Error;

/// Errors raised by the simulation, design and scenario layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("stability guard violated: {0}")]
    Stability(String),

    #[error(
        "singular field transform at t = {time:e} s: coupling vanishes where the field does not"
    )]
    SingularTransform { time: f64 },

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("optimizer did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("grid resolution guard violated: {0}")]
    Resolution(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    /// Stable machine-readable tag, used in CLI error JSON and FFI codes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parameter { .. } => "parameter",
            Error::Stability(_) => "stability",
            Error::SingularTransform { .. } => "singular-transform",
            Error::Unsupported(_) => "unsupported",
            Error::Convergence { .. } => "convergence",
            Error::Resolution(_) => "resolution",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
