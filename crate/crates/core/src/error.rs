use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("leading coefficient {0:e} is too small to divide by")]
    DivisionByNonUnit(f64),
    #[error("constant term must be {expected} for {op}")]
    BranchPointAtOrigin { op: &'static str, expected: &'static str },
    #[error("inner series of a composition must vanish at the origin")]
    InnerNotVanishing,
    #[error("series is not invertible at the origin")]
    NotInvertibleAtOrigin,
    #[error("|z| = {0} exceeds the evaluation radius {1}")]
    RadiusExceeded(f64, f64),
    #[error("non-finite coefficient at degree {0}")]
    NonFinite(usize),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("degree {0} exceeds the supported maximum {1}")]
    DegreeTooLarge(usize, usize),
    #[error("order m = {m} outside -{n}..={n}")]
    OrderOutOfRange { n: usize, m: i64 },
    #[error("quadrature disagrees with the polynomial by {0:e}")]
    QuadratureUnderresolved(f64),
    #[error("no root of the Koebe quadratic lies in the disk")]
    BranchSelectionFailure,
    #[error("transition velocity has a pole at w = -1")]
    PoleAtMinusOne,
    #[error("|1 - kappa f| = {0:e} is too close to zero")]
    StepRejected(f64),
    #[error("trajectory left the unit disk (|f| = {0})")]
    TrajectoryEscaped(f64),
    #[error("|z f'| = {0:e} is too small for the Herglotz quotient")]
    DerivativeUnderflow(f64),
    #[error("logarithm lost continuity along the contour")]
    BranchTrackingFailure,
    #[error("no Loewner chain available for {0}")]
    ChainUnavailable(String),
    #[error("unknown function spec: {0}")]
    UnknownFunction(String),
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error("io failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Errors caused by the caller's input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::ParamOutOfRange(_)
                | Error::UnknownFunction(_)
                | Error::UnknownSuite(_)
                | Error::ChainUnavailable(_)
                | Error::DegreeTooLarge(..)
                | Error::OrderOutOfRange { .. }
        )
    }
}
