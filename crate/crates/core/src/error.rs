use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("energy {z} is within {margin:e} of the half-line [0, inf) (distance {dist:e})")]
    TooCloseToHalfLine { z: Complex64, dist: f64, margin: f64 },

    #[error("base {0} lies on the branch cut (-inf, 0]")]
    BranchCut(Complex64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix decomposition failed: {0}")]
    Decomposition(String),

    #[error("loss of precision: {0}")]
    Precision(String),

    #[error("root search drifted into the exclusion margin at {0}")]
    BoundaryDrift(Complex64),

    #[error("a zero of the determinant lies too close to the contour (|f'/f| = {0:e})")]
    NearContourZero(f64),

    #[error("winding number {0} is not within 0.1 of an integer")]
    NonIntegerWinding(f64),

    #[error("empty suite")]
    EmptySuite,
}

/// Coarse classification, used by the command-line front end to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// A caller broke a documented precondition.
    Precondition,
    /// The numerics failed on otherwise valid input.
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter(_)
            | Error::TooCloseToHalfLine { .. }
            | Error::BranchCut(_)
            | Error::EmptySuite => ErrorClass::Precondition,
            Error::NonFinite(_)
            | Error::Decomposition(_)
            | Error::Precision(_)
            | Error::BoundaryDrift(_)
            | Error::NearContourZero(_)
            | Error::NonIntegerWinding(_) => ErrorClass::Numerical,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
