use thiserror::Error;

/// Errors raised by the matrix kernels, solvers and file front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("eigensolver failed to converge on a {dim}x{dim} matrix")]
    EigensolverFailure { dim: usize },

    #[error("eigenvalue {value} lies outside the domain {domain}")]
    DomainViolation { value: f64, domain: String },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("inner product has imaginary residue {residue:e}")]
    NonRealResult { residue: f64 },

    #[error("shifted spectrum value {value} falls outside the conjugate domain {domain}")]
    InadmissibleShift { value: f64, domain: String },

    #[error("no admissible bracket for the step equation of coordinate {coordinate}: {reason}")]
    RootBracketFailure { coordinate: usize, reason: String },

    #[error("step for coordinate {coordinate} is unbounded (infimum approached only at infinity)")]
    UnboundedStep { coordinate: usize },

    #[error("moment <F_{coordinate}, Y> = {value:e} underflowed")]
    ZeroMoment { coordinate: usize, value: f64 },

    #[error("label or hypothesis value out of range: {0}")]
    LabelRange(String),

    #[error("normalization check failed: {0}")]
    Normalization(String),

    #[error("objective increased at iteration {iteration}: {before} -> {after}")]
    DescentViolation {
        iteration: usize,
        before: f64,
        after: f64,
    },

    #[error("family registration rejected: {0}")]
    InvalidFamily(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
