use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("negative probability mass {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, expected 1 within 1e-9")]
    BadSum { sum: f64 },
    #[error("distribution needs at least 2 symbols, got {len}")]
    TooShort { len: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("transition row {row} is not stochastic: {reason}")]
    NotStochastic { row: usize, reason: String },
    #[error("matrix is not irreducible")]
    NotIrreducible,
    #[error("transition matrix is not symmetric")]
    NotSymmetric,
    #[error("initial distribution is not uniform")]
    InitialNotUniform,
    #[error("symbol {symbol} out of range for alphabet of size {m}")]
    SymbolOutOfRange { symbol: usize, m: usize },
    #[error("empty string")]
    EmptyString,
    #[error("enumeration needs {required} items, cap is {cap}")]
    EnumerationTooLarge { required: String, cap: u64 },
    #[error("k = {k} outside [0, {total}]")]
    KOutOfRange { k: String, total: String },
    #[error("rate must be positive, got {rate}")]
    NonpositiveRate { rate: f64 },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("string length {got} does not match blocklength {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid codeword {0:?}")]
    InvalidCodeword(String),
    #[error("divergence to uniform is zero; bounds are vacuous")]
    DegenerateDivergence,
    #[error("parameter out of range: {0}")]
    BadRange(String),
    #[error("need at least 2 samples, got {n}")]
    TooFewSamples { n: usize },
    #[error("delta must lie in (0, 1), got {delta}")]
    BadDelta { delta: f64 },
    #[error("epsilon {epsilon} outside {range}")]
    BadEpsilon { epsilon: f64, range: &'static str },
    #[error("power iteration did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
