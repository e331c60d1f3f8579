//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong when constructing or combining measurement
/// objects. Validation failures carry enough context to diagnose the input.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix entry ({row},{col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("not Hermitian: asymmetry {deviation} exceeds tolerance {tolerance}")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("not positive semidefinite: eigenvalue {eigenvalue} below -{tolerance}")]
    NotPsd { eigenvalue: f64, tolerance: f64 },
    #[error("not an effect: eigenvalue {eigenvalue} outside [0, 1] by more than {tolerance}")]
    NotEffect { eigenvalue: f64, tolerance: f64 },
    #[error("not a density matrix: {0}")]
    NotDensity(String),
    #[error("not an isometry: {0}")]
    NotIsometry(String),
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),
    #[error("scalar out of [0, 1]: {0}")]
    ScalarOutOfRange(String),
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("unknown atom: {0}")]
    UnknownAtom(String),
    #[error("not a measure morphism: {0}")]
    NotAMorphism(String),
    #[error("not mu-continuous: {0}")]
    NotContinuous(String),
    #[error("input too large: {0}")]
    TooLarge(String),
    #[error("value out of range: {0}")]
    RangeError(String),
    #[error("not a POVM: {0}")]
    NotAPovm(String),
    #[error("singular operator: {0}")]
    Singular(String),
    #[error("not an affine statistical map: {0}")]
    NotAffine(String),
    #[error("not a state: {0}")]
    NotAState(String),
    #[error("not a positive map: {0}")]
    NotPositive(String),
    #[error("not a unit vector: {0}")]
    NotUnit(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
