use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("quantum set mismatch: {0}")]
    SetMismatch(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("eigenvalue {0:e} below the negative tolerance")]
    NegativeEigenvalue(f64),
    #[error("relation is not dagger-symmetric: {0}")]
    NotSymmetric(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("post-hoc verification failed: {0}")]
    Verification(String),
    #[error("numerical disagreement: {0}")]
    NumericalDisagreement(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
