use thiserror::Error;

/// Errors produced by the algebra kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: String, right: String },

    #[error("not a unit: {0}")]
    NotUnit(String),

    #[error("not nilpotent: {0}")]
    NotNilpotent(String),

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrices do not commute")]
    NotCommuting,

    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }
}
