use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::metric::Flag;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse failure class; drives the CLI exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Parse,
    Validation,
    Resource,
    InternalCheck,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage => 1,
            ErrorKind::Parse => 2,
            ErrorKind::Validation => 3,
            ErrorKind::Resource => 4,
            ErrorKind::InternalCheck => 5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Usage => "usage",
            ErrorKind::Parse => "parse",
            ErrorKind::Validation => "validation",
            ErrorKind::Resource => "resource",
            ErrorKind::InternalCheck => "internal-check",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distance matrix is not square (row {row} has {len} entries, expected {expected})")]
    NonSquare { row: usize, len: usize, expected: usize },
    #[error("negative distance {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: BigRational },
    #[error("required property `{flag}` violated at {witness:?}")]
    RequiredFlagViolated { flag: Flag, witness: Vec<usize> },
    #[error("point index {index} out of range for a space with {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(BigRational),
    #[error("infinite distance between points {0} and {1}")]
    InfiniteDistance(usize, usize),
    #[error("zeta matrix is singular")]
    SingularZeta,
    #[error("magnitude has a pole at the evaluation point t = {0}")]
    PoleAtEvaluationPoint(BigRational),
    #[error("space is not separated: d({0}, {1}) = 0")]
    NotSeparated(usize, usize),
    #[error("space is not symmetric: d({0}, {1}) != d({1}, {0})")]
    NotSymmetric(usize, usize),
    #[error("minimum positive distance is zero")]
    ZeroMinimumDistance,
    #[error("denominator has zero constant term; no power series expansion at q = 0")]
    DenominatorConstantTermZero,
    #[error("boundary matrices built in different modes")]
    ModeMismatch,
    #[error("{what} count {count} exceeds the cap of {cap}")]
    ResourceBound { what: &'static str, count: usize, cap: usize },
    #[error("degree bound n_max = {n_max} is too small: grades up to {l_max} need n_max >= {needed}")]
    InsufficientDegreeBound { n_max: usize, l_max: BigRational, needed: usize },
    #[error("{0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("filtered complex is not sorted at cell {0}")]
    UnsortedComplex(usize),
    #[error("points have mismatched dimensions: point {index} has {found}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("rounding broke the triangle inequality at {0:?}")]
    TriangleBrokenByRounding(Vec<usize>),
    #[error("line {line}, column {col}: {reason}")]
    ParseError { line: usize, col: usize, reason: String },
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("internal check failed: {0}")]
    InternalCheck(String),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            ParseError { .. } => ErrorKind::Parse,
            ResourceBound { .. } | Overflow(_) => ErrorKind::Resource,
            InternalCheck(_) => ErrorKind::InternalCheck,
            Usage(_) => ErrorKind::Usage,
            _ => ErrorKind::Validation,
        }
    }
}
