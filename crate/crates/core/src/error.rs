use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("encoding error: {0}")]
    Encoding(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("metrics error: {0}")]
    Metrics(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("dynamical decoupling policy error: {0}")]
    Policy(String),
    #[error("noise model error: {0}")]
    Noise(String),
}

/// Coarse error category used for reporting and process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Data,
    Model,
    Metrics,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config(_) | Error::Policy(_) | Error::Noise(_) => ErrorCategory::Config,
            Error::Data(_) | Error::Parse { .. } | Error::Encoding(_) => ErrorCategory::Data,
            Error::Dimension(_) | Error::Model(_) => ErrorCategory::Model,
            Error::Metrics(_) => ErrorCategory::Metrics,
        }
    }
}

impl std::fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ErrorCategory::Config => "config",
            ErrorCategory::Data => "data",
            ErrorCategory::Model => "model",
            ErrorCategory::Metrics => "metrics",
        };
        f.write_str(s)
    }
}
