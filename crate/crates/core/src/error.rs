use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} exceeds the configured limit {limit}")]
    OrderTooLarge { p: u64, k: u32, limit: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("element {value} is out of range for a field of order {q}")]
    ElementOutOfRange { value: u64, q: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("counter scope closed without a matching open")]
    UnbalancedScope,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("vector has non-zero entries beyond the first {bound} coordinates")]
    SupportViolation { bound: usize },
    #[error("no non-zero vector has zeros at all {excluded} excluded positions of {n}")]
    EmptyVectorSpace { n: usize, excluded: usize },
    #[error("division by the zero polynomial")]
    ZeroPolynomial,
    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("randomized factorization failed to split a factor; retry with a fresh seed")]
    FactorizationFailed,
    #[error("epsilon must satisfy 0 < epsilon < 1/2, got {0}")]
    EpsilonOutOfRange(String),
    #[error("invalid primary cyclic spec: {0}")]
    InvalidSpec(String),
    #[error("invalid candidate: {0}")]
    InvalidCandidate(String),
    #[error("dimension {n} exceeds the oracle limit {limit}")]
    OracleLimit { n: usize, limit: usize },
    #[error("unknown bound tag `{0}`")]
    UnknownBoundTag(String),
    #[error("bound `{tag}` requires parameter `{param}`")]
    MissingBoundParam {
        tag: &'static str,
        param: &'static str,
    },
    #[error("invalid bound parameters: {0}")]
    InvalidBoundParams(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("field mismatch: expected order {expected}, input has order {found}")]
    FieldMismatch { expected: u32, found: u32 },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
