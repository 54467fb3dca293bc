use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("mismatched truncation orders {0} and {1}")]
    TruncationMismatch(usize, usize),
    #[error("inexact division by h: {0}")]
    InexactDivision(String),
    #[error("series is not a unit (constant term is zero)")]
    NonUnit,
    #[error("rewrite step budget of {0} exhausted")]
    StepBudget(u64),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("degree cap {cap} overflowed: {what}")]
    CapOverflow { cap: usize, what: String },
    #[error("input is not a cycle: {0}")]
    NotACycle(String),
    #[error("degree cap {cap} too small: functional nonzero in degree {degree}")]
    GuardViolation { cap: usize, degree: usize },
    #[error("no unit cocycle spans the top Ext group: {0}")]
    NoUnitCocycle(String),
    #[error("inconsistent module: {0}")]
    InconsistentModule(String),
    #[error("linear system has no solution: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
