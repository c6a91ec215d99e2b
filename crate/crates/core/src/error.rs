//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative numerical routine failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Caller violated an interface contract (lengths, ranges, alignment).
    #[error("contract violation: {0}")]
    Contract(String),
    /// Sequence composition does not match the codec composition.
    #[error("composition mismatch: {0}")]
    Composition(String),
    /// Sequence ranks outside the matcher image (rank >= 2^k).
    #[error("out of image: {0}")]
    OutOfImage(String),
    /// Invalid physical or grid configuration.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = core::result::Result<T, Error>;
