use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// LIP subtraction by a value at or above the grey-scale bound.
    #[error("LIP subtraction undefined: subtrahend {0} is not below M = 256")]
    LipDomain(f64),

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("degenerate probe: {0}")]
    DegenerateProbe(String),

    #[error("no field of view found above threshold {0}")]
    NoFov(f64),

    #[error("image {width}x{height} is smaller than the largest probe (width {probe_width:.2})")]
    ImageTooSmall {
        width: usize,
        height: usize,
        probe_width: f64,
    },
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
