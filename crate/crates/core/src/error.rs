use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (relative symmetry residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is numerically singular (pivot {pivot})")]
    Singular { pivot: usize },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },
    #[error(
        "null space is ill-determined: next eigenvalue {next:e} is within 10x of the threshold {threshold:e}"
    )]
    GapTooSmall { next: f64, threshold: f64 },
    #[error("operator has spectrum on the unit circle (eigenvalue {eigenvalue})")]
    TorusSpectrum { eigenvalue: Complex64 },
    #[error("no root found: {0}")]
    NoRoot(String),
    #[error("invalid bisection bracket: {0}")]
    BracketInvalid(String),
    #[error("matrix is not nilpotent of order {order} (residual {residual:e})")]
    NotNilpotent { order: usize, residual: f64 },
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("kernel of T0 is singular at interior point z = {z}")]
    InteriorSingular { z: Complex64 },
    #[error("operator is not a rho-contraction (kernel min eigenvalue {min_eigenvalue:e} at z = {z})")]
    NotRhoContraction { z: Complex64, min_eigenvalue: f64 },
    #[error("reversal symmetry has sign +1, expected -1")]
    ReversalSymmetric,
    #[error("residual check failed: {0}")]
    ResidualCheck(String),
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Numeric failures as opposed to bad input; the CLI maps these to exit code 3.
    pub fn is_numeric(&self) -> bool {
        !matches!(self, Error::InvalidInput(_) | Error::DimensionMismatch { .. })
    }
}
