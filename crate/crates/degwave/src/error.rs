use thiserror::Error;

/// Errors surfaced by the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("profile does not degenerate at 0: g(0) = {0}")]
    NonDegenerate(f64),
    #[error("profile is not strictly positive on (0,1]: g({x}) = {value}")]
    NotPositive { x: f64, value: f64 },
    #[error("drift quotient b/a is not integrable near 0 (partial sums exceeded {cap})")]
    NonIntegrableDrift { cap: f64 },
    #[error("grid functions live on different grids ({left} vs {right} nodes)")]
    GridMismatch { left: usize, right: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("quadratic form is negative ({0}); lambda exceeds the Hardy-Poincare threshold")]
    NegativeSquare(f64),
    #[error("generalized eigensolve failed: {0}")]
    EigensolveFailure(String),
    #[error("degeneracy class required but coefficient is not (WD) or (SD)")]
    ClassRequired,
    #[error("linear solve failed: {0}")]
    SolverFailure(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("observation window T = {t} does not exceed the threshold T0 = {t0}")]
    TimeTooShort { t: f64, t0: f64 },
    #[error("sampling budget must be positive")]
    BudgetZero,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
