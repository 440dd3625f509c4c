//! Error type shared across the crate.
//!
//! Errors fall into two categories that callers (notably the CLI) map to
//! distinct exit codes: [`ErrorCategory::Validation`] for bad inputs or
//! unusable configuration, and [`ErrorCategory::Numerical`] for failures of
//! the numeric procedures themselves (singular systems, undefined metrics).

use thiserror::Error;

/// Broad failure class, used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Input data, configuration, or request was invalid.
    Validation,
    /// A numeric procedure failed (singularity, undefined quantity).
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("meter {meter_id}: series is empty")]
    EmptySeries { meter_id: String },

    #[error("meter {meter_id}: no observed values to impute from")]
    NoObservedValues { meter_id: String },

    #[error("meter {meter_id}: series mean {mean} is not positive; cannot normalize")]
    NonPositiveMean { meter_id: String, mean: f64 },

    #[error("{context}: series of length {got} is shorter than the required {needed}")]
    SeriesTooShort {
        context: String,
        needed: usize,
        got: usize,
    },

    #[error("series of length {len} is too short to decompose with period {period} (needs at least {})", 2 * period)]
    TooShortToDecompose { len: usize, period: usize },

    #[error("requested horizon {horizon} exceeds the {len}-day temperature history")]
    HorizonExceedsHistory { horizon: usize, len: usize },

    #[error("missing temperature for forecast day {date}")]
    MissingTemperature { date: chrono::NaiveDate },

    #[error("unknown meter id {meter_id:?}")]
    UnknownMeter { meter_id: String },

    #[error("rule covers {got} rows; at least {needed} are required to define a forecast band")]
    InsufficientCoverage { needed: usize, got: usize },

    #[error("rank-deficient design: the linear system has no unique solution")]
    RankDeficient,

    #[error("relative absolute error is undefined: reference values are constant")]
    UndefinedRae,

    #[error("{0}")]
    InvalidInput(String),

    #[error("I/O error{}: {source}", path.as_ref().map(|p| format!(" on {p}")).unwrap_or_default())]
    Io {
        path: Option<String>,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Convenience constructor for free-form validation failures.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Attach a path to an I/O error.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: Some(path.into()),
            source,
        }
    }

    /// Which broad class this error belongs to.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::RankDeficient | Error::UndefinedRae => ErrorCategory::Numerical,
            _ => ErrorCategory::Validation,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(source: std::io::Error) -> Self {
        Error::Io { path: None, source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
