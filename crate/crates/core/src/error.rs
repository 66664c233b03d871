use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument is outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration object is internally inconsistent.
    #[error("config error: {0}")]
    Config(String),

    /// Input data is malformed (non-finite values, length mismatches, empty lists).
    #[error("input error: {0}")]
    Input(String),

    /// A root-finding bracket does not contain a sign change.
    #[error("bracketing error: {0}")]
    Bracket(String),

    /// A numeric computation degenerated (singular matrix, zero cell, empty inversion).
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
