use thiserror::Error;

/// Errors produced by the library.
///
/// `Invariant` signals an implementation bug (a mathematically guaranteed
/// relation failed to hold); every other variant is a problem with the input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoreError {
    #[error("ground set size {n} is outside the supported range 0..={max}")]
    GroundSetSize { n: usize, max: usize },
    #[error("table has {found} entries, expected 2^n = {expected}")]
    TableLength { expected: usize, found: usize },
    #[error("effective domain is empty (at least one finite value is required)")]
    EmptyDomain,
    #[error("set family is empty")]
    EmptyFamily,
    #[error("subset {subset:#b} is not contained in the ground set of size {n}")]
    SubsetOutOfRange { subset: u32, n: usize },
    #[error("element {element} is outside the ground set 1..={n}")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("exact arithmetic overflow (values or denominators too large)")]
    Overflow,
    #[error("enumeration universe of {size} items exceeds the limit {max}")]
    UniverseTooLarge { size: u128, max: u128 },
    #[error("invalid matroid: {0}")]
    InvalidMatroid(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
