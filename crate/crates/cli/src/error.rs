use std::path::PathBuf;

use qenc_core::ErrorCategory;
use thiserror::Error;

pub type RunResult<T> = std::result::Result<T, RunError>;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] qenc_core::Error),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("plot error: {0}")]
    Plot(String),
    #[error("download error: {0}")]
    Fetch(String),
}

impl RunError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RunError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn category(&self) -> &'static str {
        match self {
            RunError::Core(e) => match e.category() {
                ErrorCategory::Config => "config",
                ErrorCategory::Data => "data",
                ErrorCategory::Model => "model",
                ErrorCategory::Metrics => "metrics",
            },
            RunError::Config(_) => "config",
            RunError::Io { .. } | RunError::Fetch(_) => "data",
            RunError::Plot(_) => "plot",
        }
    }

    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        if self.category() == "config" {
            2
        } else {
            1
        }
    }
}
