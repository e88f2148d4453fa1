use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("grid needs at least {required} points, got {found}")]
    InsufficientGrid { required: usize, found: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("scatter matrix is singular")]
    SingularScatter,
    #[error("iteration did not converge after {iterations} steps")]
    Convergence { iterations: usize, last: Vec<f64> },
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),
    #[error("covariance is not positive definite after jitter escalation")]
    InvalidCovariance,
}
