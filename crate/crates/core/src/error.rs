use alloc::string::String;

/// Errors raised by the model, sampler and evaluation routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter is outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Vectors or matrices whose lengths must agree do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// The requested configuration cannot be run.
    #[error("configuration error: {0}")]
    Config(String),
    /// The input is degenerate for the estimator (e.g. an all-zero series).
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// An operation that needs at least one element received none.
    #[error("empty input: {0}")]
    Empty(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::Error::Domain(alloc::format!($($arg)*)) };
}
macro_rules! dimension {
    ($($arg:tt)*) => { $crate::Error::Dimension(alloc::format!($($arg)*)) };
}
pub(crate) use {dimension, domain};
