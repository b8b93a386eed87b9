use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("extension degree {0} outside 1..=14")]
    DegreeTooLarge(u32),
    #[error("field of order {p}^{m} does not fit the 32-bit element encoding")]
    FieldTooLarge { p: u32, m: u32 },
    #[error("degree {d} does not divide extension degree {m}")]
    NonDivisor { d: u32, m: u32 },
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("polynomial division left a nonzero remainder")]
    RemainderNonzero,
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("the two points are identical")]
    IdenticalPoints,
    #[error("all coordinates are zero")]
    ZeroPoint,
    #[error("tangent cone is not a power of a single linear form")]
    TangentConeNotPower,
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("computed local weight {computed} disagrees with expected {expected} for class {class}")]
    ClassificationMismatch { class: String, computed: u64, expected: u64 },
    #[error("binomial order matrix is singular mod p; weight is only a lower bound")]
    IndeterminateWeight,
    #[error("curve is singular")]
    SingularCurve,
    #[error("unknown subgroup name {0:?}")]
    UnknownName(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("q = {0} is not a supported prime power")]
    InvalidQ(u64),
    #[error("computation exceeds the desk-scale cap: {0}")]
    ScaleExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("I/O failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
