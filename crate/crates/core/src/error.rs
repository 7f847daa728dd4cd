use thiserror::Error;

/// Errors raised by the restriction toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("group has {size} points, above the size cap of {cap}")]
    SizeCap { size: u128, cap: u64 },
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {value} out of range for modulus {modulus}")]
    CoordinateRange { value: u64, modulus: u64 },
    #[error("operands belong to different groups")]
    SpecMismatch,
    #[error("function is defined on {got}, expected {expected}")]
    WrongDomain {
        expected: &'static str,
        got: &'static str,
    },
    #[error("exponent out of range: {0}")]
    Exponent(String),
    #[error("hypothesis 0 < b <= a < n violated: n = {n}, a = {a}, b = {b}")]
    Hypothesis { n: usize, a: String, b: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid polynomial: {0}")]
    Polynomial(String),
    #[error("invalid measure: {0}")]
    Measure(String),
    #[error("invalid scale: {0}")]
    Scale(String),
    #[error("zero function has no finite ratio")]
    ZeroFunction,
    #[error("scan too large: {0}")]
    ScanTooLarge(String),
    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;
