use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("quadrature did not converge: best value {value_re}+{value_im}i, error estimate {error_estimate:e}")]
    NonConvergence {
        value_re: f64,
        value_im: f64,
        error_estimate: f64,
    },
    #[error("grid of {requested} points exceeds the memory cap of {cap}")]
    GridTooLarge { requested: usize, cap: usize },
    #[error("degenerate sweep: {0}")]
    DegenerateSweep(String),
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("degenerate critical point: {0}")]
    DegenerateCritical(String),
    #[error("critical point is not isolated: {0}")]
    NotIsolated(String),
    #[error("Hessian is not symmetric (asymmetry {0:e})")]
    NonSymmetricHessian(f64),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("integration domain lies outside the grid")]
    DomainOutsideGrid,
    #[error("grid too small: doubling the extent changed the norm by {relative_change:e}")]
    TailTooFat { relative_change: f64 },
    #[error("band limit violated: {fraction:e} of spectral mass in the top octave")]
    BandLimitViolation { fraction: f64 },
    #[error("dyadic tail needs {needed} pieces, cap is {cap}")]
    TailBudgetExceeded { needed: usize, cap: usize },
    #[error("not found: {0}")]
    NotFound(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
