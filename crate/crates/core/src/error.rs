use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QsumError {
    #[error("modulus k must be at least 2, got {0}")]
    InvalidModulus(usize),
    #[error("residue {value} is out of range for modulus {modulus}")]
    ResidueOutOfRange { value: usize, modulus: usize },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("non-finite amplitude")]
    NonFinite,
    #[error("operator is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error("function table has {actual} values, expected n = {expected}")]
    TableLength { expected: usize, actual: usize },
    #[error("step r = {r} is invalid for n = {n}")]
    InvalidStep { n: usize, r: usize },
    #[error("block count s = {s} must satisfy 2 <= s <= k = {k}")]
    InvalidBlockCount { s: usize, k: usize },
    #[error("core circuit needs r | n, got n = {n}, r = {r}")]
    StepDoesNotDivide { n: usize, r: usize },
    #[error("position {x} is out of range for n = {n}")]
    PositionOutOfRange { x: usize, n: usize },
    #[error("query count q = {q} exceeds n = {n}")]
    QueryCountOutOfRange { q: usize, n: usize },
    #[error("{what} requires n = {n}, k = {k}")]
    WrongShape {
        what: &'static str,
        n: usize,
        k: usize,
    },
    #[error("enumerating {count} oracles exceeds the cap of {cap}")]
    CapExceeded { count: u128, cap: u128 },
}

pub type Result<T> = std::result::Result<T, QsumError>;
