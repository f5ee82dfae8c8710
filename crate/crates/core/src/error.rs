use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),

    #[error("extension degree {0} is outside the supported range 1..=6")]
    DegreeTooLarge(u32),

    #[error("polynomial {0:?} is reducible over F_{1}")]
    ReduciblePolynomial(Vec<u32>, u32),

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what}: size {size} exceeds cap {cap}")]
    SizeCapExceeded { what: &'static str, size: u128, cap: u128 },

    #[error("spectral sum {value} is not within {tol} of an integer")]
    NumericalDrift { value: f64, tol: f64 },

    #[error("point {0} is not on the required sphere")]
    NotOnSphere(usize),

    #[error("tuple does not produce a cycle with distinct vertices")]
    NotGoodTuple,

    #[error("connection set must be symmetric")]
    NotSymmetric,

    #[error("connection set contains the zero vector")]
    ZeroInConnectionSet,

    #[error("requested size {requested} but only {available} points are available")]
    InfeasibleSize { requested: usize, available: usize },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invariant violated: {0}")]
    InvariantViolated(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn cap(what: &'static str, size: u128, cap: u128) -> Self {
        Error::SizeCapExceeded { what, size, cap }
    }
}
