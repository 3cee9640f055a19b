use crate::radial::RadialField;

/// Errors raised by the numerical routines.
///
/// The variants fall into three families that the command-line front end maps
/// onto exit codes: hypothesis failures (a mathematical precondition does not
/// hold), numerical failures (a solver did not deliver) and configuration
/// errors (the caller passed something malformed).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("radius {radius} outside the tabulated range [0, {limit}]")]
    OutOfRange { radius: f64, limit: f64 },

    #[error("singular system: pivot {pivot:e} at row {row}")]
    Singular { row: usize, pivot: f64 },

    #[error("no convergence after {iterations} iterations: {detail}")]
    NoConvergence {
        iterations: usize,
        detail: String,
        last: Option<Box<RadialField>>,
    },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("inconsistent result: {0}")]
    Inconsistent(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Hypothesis,
    Numerical,
    Config,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Hypothesis(_) | Error::Precondition(_) | Error::Inconclusive(_) => {
                ErrorClass::Hypothesis
            }
            Error::Domain(_)
            | Error::Singular { .. }
            | Error::NoConvergence { .. }
            | Error::Inconsistent(_) => ErrorClass::Numerical,
            Error::InvalidParameter(_)
            | Error::OutOfRange { .. }
            | Error::Parse(_)
            | Error::Io(_) => ErrorClass::Config,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
