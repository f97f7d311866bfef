use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: ||A - A^H||_F = {asymmetry:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("columns are not orthonormal: ||Q^H Q - I||_F = {defect:e}")]
    NotOrthonormal { defect: f64 },

    #[error("subspace dimensions differ: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("consecutive subspaces are numerically orthogonal (smallest cosine {smallest_cosine:e}); refine the grid")]
    RankCollapse { smallest_cosine: f64 },

    #[error("count mismatch: {0}")]
    CountMismatch(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("basis does not span an invariant subspace: residual {residual:e}")]
    NotInvariant { residual: f64 },

    #[error("{method} did not converge after {sweeps} sweeps")]
    NoConvergence { method: &'static str, sweeps: usize },

    #[error("invalid problem spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
