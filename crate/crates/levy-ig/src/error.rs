use std::path::PathBuf;

use serde_json::{json, Value};

/// Everything the std front end can fail with. Numerical errors are carried
/// through unchanged from the core crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] levy_ig_core::Error),

    #[error("cannot read or write `{}`: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid model file: {0}")]
    Model(String),

    #[error("invalid sample file, line {line}: {message}")]
    Samples { line: usize, message: String },

    #[error("invalid benchmark settings: {0}")]
    Bench(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            Error::Core(e) => e.code(),
            Error::Io { .. } => "io",
            Error::Model(_) => "model_file",
            Error::Samples { .. } => "sample_file",
            Error::Bench(_) => "benchmark_settings",
        }
    }

    /// Structured details for the JSON error object.
    pub fn details(&self) -> Value {
        use levy_ig_core::Error as C;
        match self {
            Error::Core(C::InvalidParameter { name, value, .. }) => {
                json!({ "name": name, "value": value })
            }
            Error::Core(C::GridTooSmall {
                mass,
                suggested_halfwidth,
            }) => json!({ "mass": mass, "suggested_halfwidth": suggested_halfwidth }),
            Error::Core(C::StepTooSmall { step, residual }) => {
                json!({ "step": step, "residual": residual })
            }
            Error::Core(C::BenchmarkFailures {
                failures,
                replicates,
            }) => {
                json!({ "failures": failures, "replicates": replicates })
            }
            Error::Io { path, .. } => json!({ "path": path.display().to_string() }),
            Error::Samples { line, .. } => json!({ "line": line }),
            _ => json!({}),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
