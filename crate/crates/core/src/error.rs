use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix of odd dimension {0} cannot be symplectic")]
    DimensionOdd(usize),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("imaginary part is not positive definite")]
    NotInSiegelSpace,
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("matrix is not in G_D")]
    NotInGD,
    #[error("matrix has non-integer entries")]
    NonIntegerEntries,
    #[error("numerically singular matrix (|det| = {0:e})")]
    NumericalSingularity(f64),
    #[error("unsupported dimension g = {0}")]
    UnsupportedDimension(usize),
    #[error("cone dimension {0} exceeds the supported maximum")]
    DimensionTooLarge(usize),
    #[error("iteration cap {0} exceeded")]
    MaxIterationsExceeded(usize),
    #[error("truncation would need about {0:e} lattice points")]
    TruncationRadiusOverflow(f64),
    #[error("invalid polarization type: {0}")]
    InvalidPolarization(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),
    #[error("all {rejected} samples had a vanishing denominator")]
    DenominatorNearZero { rejected: usize },
    #[error("all projective coordinates vanish")]
    CommonZeroSuspected,
    #[error("projective points cannot be aligned")]
    PivotMismatch,
    #[error("integer overflow in exact arithmetic")]
    Overflow,
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MaxIterationsExceeded(_) | Error::TruncationRadiusOverflow(_) | Error::Overflow => 3,
            _ => 2,
        }
    }

    /// Short machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DimensionOdd(_) => "DimensionOdd",
            Error::NotSymmetric => "NotSymmetric",
            Error::NotPositiveDefinite => "NotPositiveDefinite",
            Error::NotInSiegelSpace => "NotInSiegelSpace",
            Error::NotSymplectic => "NotSymplectic",
            Error::NotInGD => "NotInGD",
            Error::NonIntegerEntries => "NonIntegerEntries",
            Error::NumericalSingularity(_) => "NumericalSingularity",
            Error::UnsupportedDimension(_) => "UnsupportedDimension",
            Error::DimensionTooLarge(_) => "DimensionTooLarge",
            Error::MaxIterationsExceeded(_) => "MaxIterationsExceeded",
            Error::TruncationRadiusOverflow(_) => "TruncationRadiusOverflow",
            Error::InvalidPolarization(_) => "InvalidPolarization",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InfeasibleParameters(_) => "InfeasibleParameters",
            Error::DenominatorNearZero { .. } => "DenominatorNearZero",
            Error::CommonZeroSuspected => "CommonZeroSuspected",
            Error::PivotMismatch => "PivotMismatch",
            Error::Overflow => "Overflow",
        }
    }
}
