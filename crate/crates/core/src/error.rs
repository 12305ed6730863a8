use thiserror::Error;

/// Errors raised by the click-statistics and criteria routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QngError {
    #[error("parameter `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("parameter `{name}` = {value} is outside {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("Fock expansion truncated at cutoff {cutoff}: norm {norm} below 1 - {tail_tol}")]
    Truncation { cutoff: usize, norm: f64, tail_tol: f64 },

    #[error("invalid channel subset: {0}")]
    InvalidSubset(String),

    #[error("invalid detector configuration: {0}")]
    InvalidDetector(String),

    #[error("computed probability {value} for {what} lies outside [0, 1] beyond tolerance")]
    ProbabilityOutOfBounds { what: &'static str, value: f64 },

    #[error("criterion order must be at least 1")]
    ZeroOrder,

    #[error("detector has {channels} channels but a criterion of order {order} needs {}", order + 1)]
    OrderMismatch { order: usize, channels: usize },

    #[error("functional parameter a = {0} must be negative")]
    NonNegativeA(f64),

    #[error("invalid parameter grid: {0}")]
    InvalidGrid(String),

    #[error("{0}")]
    NotDetectable(String),

    #[error("time average did not converge: error estimate {estimate:e} above target {target:e}")]
    Quadrature { estimate: f64, target: f64 },

    #[error("failed to parse {what}: {message}")]
    Parse { what: String, message: String },
}

pub type Result<T> = std::result::Result<T, QngError>;

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(QngError::NonFinite { name, value })
    }
}

pub(crate) fn in_unit_interval(name: &'static str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(QngError::OutOfRange {
            name,
            value,
            expected: "[0, 1]",
        })
    }
}
