use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] approx_sense::Error),

    #[error("{0}")]
    Usage(String),

    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{path}: unsupported schema_version {found}, expected {expected}")]
    Schema { path: PathBuf, found: u32, expected: u32 },

    #[error("`{command}` needs the `{section}` section in the config")]
    MissingSection { command: &'static str, section: &'static str },

    #[error("bound `{bound}` is missing constituent `{name}`")]
    MissingConstituent { bound: &'static str, name: &'static str },

    #[error("{path}: {message}")]
    Constituent { path: PathBuf, message: String },

    #[error("failed to write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("suite `{suite}` failed: {violations} of {trials} trials violated (coverage {coverage}, required {required})")]
    ValidationFailed {
        suite: String,
        violations: usize,
        trials: usize,
        coverage: f64,
        required: f64,
    },
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Usage(_) => "usage",
            CliError::Config { .. } => "config",
            CliError::Schema { .. } => "schema_version",
            CliError::MissingSection { .. } => "missing_config_section",
            CliError::MissingConstituent { .. } => "missing_constituent",
            CliError::Constituent { .. } => "constituent",
            CliError::Write { .. } => "io",
            CliError::ValidationFailed { .. } => "validation_failed",
        }
    }

    /// 2 for bad invocations or configs, 3 for a failed validation suite, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_)
            | CliError::Config { .. }
            | CliError::Schema { .. }
            | CliError::MissingSection { .. }
            | CliError::MissingConstituent { .. }
            | CliError::Core(approx_sense::Error::UnknownSuite(_)) => 2,
            CliError::ValidationFailed { .. } => 3,
            _ => 1,
        }
    }

    /// One-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        json!({"error": {"code": self.code(), "message": self.to_string()}}).to_string()
    }
}
