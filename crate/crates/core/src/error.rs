use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not Hermitian (max |M - M*| entry = {deviation:.3e}, tolerance {tol:.1e})")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("Hermitian eigendecomposition did not converge")]
    ConvergenceFailure,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid covariance operator: {0}")]
    InvalidCovariance(String),

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("covariance has trace {trace:.3e}; no state is defined for a zero field")]
    ZeroField { trace: f64 },

    #[error("operator {index} is not an orthogonal projector ({reason})")]
    NotProjector { index: usize, reason: String },

    #[error("projectors {first} and {second} are not mutually orthogonal (|P_i P_j|_F = {overlap:.3e})")]
    NotOrthogonal { first: usize, second: usize, overlap: f64 },

    #[error("projectors do not sum to the identity (residual {residual:.3e})")]
    Incomplete { residual: f64 },

    #[error("block filter is not trace preserving (|sum V*V - I|_F = {residual:.3e}, tolerance {tol:.1e})")]
    NotTracePreserving { residual: f64, tol: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
