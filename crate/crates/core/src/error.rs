use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid code dimensions n={n}, k={k} (need 1 <= k < n <= 64)")]
    InvalidDimensions { n: usize, k: usize },

    #[error("generator rows are not linearly independent (rank {rank} < k = {k})")]
    RankDeficient { rank: usize, k: usize },

    #[error("k = {k} too large for exhaustive enumeration (limit {limit})")]
    TooLarge { k: usize, limit: usize },

    #[error("rate must lie in (0, 1], got {0}")]
    InvalidRate(f64),

    #[error("noise standard deviation must be positive, got {0}")]
    InvalidSigma(f64),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
