use thiserror::Error;

/// Errors produced by the spectral solver.
#[derive(Debug, Error)]
pub enum PpssError {
    #[error("polynomial degree must be at least 1, got {0}")]
    DegreeTooSmall(usize),

    #[error("Newton iteration for quadrature nodes failed to converge (node {node}, residual {residual:e})")]
    NodeSolveFailed { node: usize, residual: f64 },

    #[error("evaluation point {0} lies outside [-1, 1]")]
    PointOutOfDomain(f64),

    #[error("leading mass block is numerically singular")]
    SingularK11,

    #[error("Schur complement of the mass matrix is numerically singular")]
    SingularSchur,

    #[error("mass matrix is numerically singular")]
    SingularMass,

    #[error("fixed-point iteration stalled after {iters} sweeps (last update {delta:e}, tol {tol:e}); try a smaller time step")]
    FixedPointStalled { iters: usize, delta: f64, tol: f64 },

    #[error("solution became non-finite at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid wave states: {0}")]
    InvalidWaveStates(String),

    #[error("shooting failed to reach the target state (closest approach {closest:e} at u = {u:?})")]
    ShootingFailed { closest: f64, u: [f64; 2] },

    #[error("unknown problem id `{0}`")]
    UnknownProblem(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("expression error: {0}")]
    Expr(String),

    #[error("argument lists of lengths {0} and {1} cannot be paired")]
    ListLengthMismatch(usize, usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PpssError>;
