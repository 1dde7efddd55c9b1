use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// Sweep spec that parses but breaks a schema rule; `path` locates the field.
    #[error("{path}: {message}")]
    Spec { path: String, message: String },
    #[error(transparent)]
    Compute(#[from] vacuum_census::Error),
    #[error("closed form {closed_form:e} and quadrature {quadrature:e} differ by {rel_diff:e} (relative)")]
    VerifyMismatch {
        closed_form: f64,
        quadrature: f64,
        rel_diff: f64,
    },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn spec(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Spec {
            path: path.into(),
            message: message.into(),
        }
    }

    /// 2 for bad input, 3 for failures while computing or writing.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Spec { .. } => 2,
            CliError::Compute(e) if e.kind() == "invalid_parameter" => 2,
            _ => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Spec { .. } => "spec",
            CliError::Compute(e) => e.kind(),
            CliError::VerifyMismatch { .. } => "verify_mismatch",
            CliError::Io { .. } => "io",
            CliError::Csv(_) => "csv",
            CliError::Json(_) => "json",
            CliError::Pool(_) => "thread_pool",
        }
    }

    /// One-line JSON object for the diagnostic stream.
    pub fn to_json(&self) -> String {
        let mut value = serde_json::json!({
            "error": self.kind(),
            "message": self.to_string(),
        });
        if let CliError::Spec { path, .. } = self {
            value["path"] = path.clone().into();
        }
        value.to_string()
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
