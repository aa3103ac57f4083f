use thiserror::Error;

/// Errors shared by the linear algebra, trace function, barrier, verifier,
/// and solver layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian: relative asymmetry {asymmetry:.3e} exceeds {limit:.3e}")]
    NotHermitian { asymmetry: f64, limit: f64 },

    #[error("matrix contains a non-finite entry")]
    NotFinite,

    #[error("eigendecomposition failed to converge within the iteration cap")]
    EigenFailed,

    #[error("scalar function domain violation: {func} evaluated at {x}")]
    DomainViolation { func: String, x: f64 },

    #[error("matrix is not positive definite: smallest eigenvalue {min_eig:.6e} below {floor:.6e}")]
    NotPositiveDefinite { min_eig: f64, floor: f64 },

    #[error("unsupported derivative order {order} (supported: {supported})")]
    UnsupportedOrder { order: usize, supported: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point is outside the cone interior: {0}")]
    ExteriorPoint(String),

    #[error("factorization failed: {0}")]
    FactorizationFailed(String),

    #[error("constraint matrix is rank deficient (row {row} reduced to zero)")]
    RankDeficient { row: usize },

    #[error("no strictly feasible point found (phase-1 optimum {tau:.3e} >= 0)")]
    Infeasible { tau: f64 },

    #[error("iteration limit {0} reached")]
    IterationLimit(usize),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
