use thiserror::Error;

/// Errors raised by the polynomial, certificate and solver layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VariableMismatch { left: usize, right: usize },

    #[error("index {index} out of range for {len} variables")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("target degree {target} is below polynomial degree {degree}")]
    DegreeTooLow { target: i64, degree: i64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("monomial {0} cannot be expressed by the basis")]
    Unrepresentable(String),

    #[error("exact division failed: remainder is nonzero")]
    NotDivisible,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("the SDP solver is disabled in this process")]
    SolverDisabled,

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
