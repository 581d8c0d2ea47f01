//! Error type shared by every module of the crate.

use thiserror::Error;

/// Unified error type for all numerical operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An ODE integration or quadrature failed to reach the requested
    /// accuracy or produced non-finite values.
    #[error("integration failure: {0}")]
    Integration(String),

    /// A root or eigenvalue could not be bracketed in the expected window.
    #[error("bracketing failure: {0}")]
    Bracket(String),

    /// A quantity that must be strictly positive was not.
    #[error("positivity violation: {0}")]
    Positivity(String),

    /// Two sequences that must strictly interlace do not.
    #[error("interlacing violation: {0}")]
    Interlacing(String),

    /// A linear solve or similar operation hit a (near-)singular matrix.
    #[error("near-singular system: {0}")]
    NearSingular(String),

    /// An input violated a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An iterative scheme diverged or a truncated sum failed to settle.
    #[error("divergence detected: {0}")]
    Divergence(String),

    /// The requested combination of options is not supported.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// File system error while reading or writing artifacts.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization error.
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
