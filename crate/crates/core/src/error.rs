use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Zero vectors, coincident points and similar inputs with no defined geometry.
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    /// The normal matrix is singular or its condition estimate exceeds the limit.
    #[error("degenerate geometry (condition estimate {condition:.3e})")]
    DegenerateGeometry { condition: f64 },

    #[error("insufficient measurements: got {got}, need at least {need}")]
    InsufficientMeasurements { got: usize, need: usize },

    #[error("invalid value for {field}: {reason}")]
    InvalidValue { field: &'static str, reason: String },

    #[error("invalid operating point: {0}")]
    InvalidOperatingPoint(String),

    #[error("empty epoch sequence")]
    EmptyEpochs,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("run failed: {0}")]
    RunFailed(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidValue {
            field,
            reason: reason.into(),
        }
    }
}
