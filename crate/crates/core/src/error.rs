use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("operator is stochastic; use expected_sensitivity (or pass a noise seed) instead")]
    StochasticOperator,

    #[error("operator is deterministic; use empirical_sensitivity instead")]
    DeterministicOperator,

    #[error("no feasible point in the search domain{}", match .min_constraint { Some(v) => format!(" (minimum achievable sensitivity {v})"), None => String::new() })]
    Infeasible { min_constraint: Option<f64> },

    #[error("exact enumeration over 2^{m} sign patterns exceeds the cap m <= {cap}; use Monte Carlo")]
    EnumerationTooLarge { m: usize, cap: usize },

    #[error("matrix is not orthogonal: max |V^T V - I| = {deviation:e}")]
    NotOrthogonal { deviation: f64 },

    #[error("report `{name}` is inconsistent: terms sum to {sum} but value is {value}")]
    InconsistentReport { name: String, sum: f64, value: f64 },

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error in {path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Stable machine-readable code for this error.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Empty(_) => "empty_input",
            Error::NonFinite(_) => "non_finite",
            Error::StochasticOperator => "stochastic_operator",
            Error::DeterministicOperator => "deterministic_operator",
            Error::Infeasible { .. } => "infeasible",
            Error::EnumerationTooLarge { .. } => "enumeration_too_large",
            Error::NotOrthogonal { .. } => "not_orthogonal",
            Error::InconsistentReport { .. } => "inconsistent_report",
            Error::Io { .. } => "io",
            Error::Csv { .. } => "csv",
            Error::UnknownSuite(_) => "unknown_suite",
        }
    }
}

pub(crate) fn ensure_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub(crate) fn ensure_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("delta", format!("must lie in (0, 1), got {delta}")))
    }
}

pub(crate) fn ensure_sample_size(m: usize) -> Result<()> {
    if m >= 1 {
        Ok(())
    } else {
        Err(Error::invalid("m", "sample size must be at least 1"))
    }
}
