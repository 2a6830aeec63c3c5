use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular over GF(2)")]
    Singular,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("channel must have a binary input alphabet, got {0} inputs")]
    NonBinaryInput(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("blocklength {n} exceeds the enumeration limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("kernel file: {0}")]
    KernelFormat(String),
}
