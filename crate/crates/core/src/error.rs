use thiserror::Error;

/// Errors raised by state construction and the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("subsystem index {index} out of range for {subsystems} subsystems")]
    IndexOutOfRange { index: usize, subsystems: usize },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("bad shape: {0}")]
    BadShape(String),

    #[error("bad cut: {0}")]
    BadCut(String),

    #[error("matrix is not an isometry (deviation {0:e})")]
    NotIsometry(f64),

    #[error("pivot matrix is singular (|det| = {0:e})")]
    PivotSingular(f64),

    #[error("every eigenvector has vanishing determinant")]
    AllSingular,

    #[error("no finite monogamy exponent: x1 = {x1}, x2 = {x2}")]
    NonMonogamousWitness { x1: f64, x2: f64 },

    #[error("bad specification: {0}")]
    BadSpec(String),

    #[error("nilpotent subspace dimension {requested} exceeds d(d-1)/2 = {max}")]
    DimensionTooLarge { requested: usize, max: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("value {value} outside {range}")]
    OutOfRange { value: f64, range: &'static str },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
