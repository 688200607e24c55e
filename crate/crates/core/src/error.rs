use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not symmetric (max |W - W^t| = {defect:e})")]
    NonSymmetric { defect: f64 },
    #[error("point is outside the Siegel ball (min eigenvalue of 1 - W W̄ = {min_eigenvalue:e})")]
    NotInBall { min_eigenvalue: f64 },
    #[error("point is outside the Siegel upper half-plane (min eigenvalue of Im V = {min_eigenvalue:e})")]
    NotInUpperHalfPlane { min_eigenvalue: f64 },
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("rejection sampling gave up after {tries} tries")]
    RejectionLimit { tries: usize },
    #[error("matrix is numerically singular")]
    SingularMatrix,
    #[error("group action denominator is numerically singular")]
    SingularDenominator,
    #[error("group element violates its defining relations (defect {defect:e})")]
    InvalidGroupElement { defect: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("det(U)^(k/2) is ambiguous: the tracked argument {argument} left the principal strip")]
    BranchAmbiguity { argument: f64 },
    #[error("Gamma-function pole or non-integrable weight at argument {argument}")]
    GammaPole { argument: f64 },
    #[error("quadrature did not converge (error estimate {estimate:e} > tolerance {tolerance:e})")]
    NotConverged { estimate: f64, tolerance: f64 },
    #[error("finite-difference stencil leaves the domain (reach {reach:e}, margin {margin:e})")]
    StepTooLarge { reach: f64, margin: f64 },
    #[error("map is not holomorphic (anti-holomorphic Jacobian block {defect:e})")]
    NonHolomorphic { defect: f64 },
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonSymmetric { .. } => "NonSymmetric",
            Error::NotInBall { .. } => "NotInBall",
            Error::NotInUpperHalfPlane { .. } => "NotInUpperHalfPlane",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::RejectionLimit { .. } => "RejectionLimit",
            Error::SingularMatrix => "SingularMatrix",
            Error::SingularDenominator => "SingularDenominator",
            Error::InvalidGroupElement { .. } => "InvalidGroupElement",
            Error::InvalidInput(_) => "InvalidInput",
            Error::InvalidParams(_) => "InvalidParams",
            Error::BranchAmbiguity { .. } => "BranchAmbiguity",
            Error::GammaPole { .. } => "GammaPoleError",
            Error::NotConverged { .. } => "NotConverged",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::NonHolomorphic { .. } => "NonHolomorphic",
        }
    }
}
