use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A state component left the divergence bound.
    #[error("trajectory diverged at t = {t}: x1 = {x1}, x2 = {x2}")]
    Diverged { t: f64, x1: f64, x2: f64 },

    #[error("combiner expects {expected} channels, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    /// Set and Reset asserted together.
    #[error("forbidden latch input (1,1){}", .bit_index.map(|i| format!(" at bit {i}")).unwrap_or_default())]
    ForbiddenInput { bit_index: Option<usize> },

    #[error("no samples left to decode in bit {bit_index}")]
    EmptySegment { bit_index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed program data: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
