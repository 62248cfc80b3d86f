use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: ||A - A*||_F = {residual:.3e}")]
    NotHermitian { residual: f64 },

    #[error("operator norm {norm:.12} exceeds 1 beyond tolerance")]
    NotContraction { norm: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid BCL triple: {0}")]
    InvalidTriple(String),

    #[error("cross-commutator is not normal: relative residual {residual:.3e} exceeds {tol:.1e}")]
    NotNormal { residual: f64, tol: f64 },

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
