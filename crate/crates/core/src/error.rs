use thiserror::Error;

/// Errors raised while constructing or analysing channels and splits.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: &'static str,
    },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid tolerance {0}: must be finite and > 0")]
    InvalidTolerance(f64),

    #[error("channel has no Kraus operators")]
    EmptyKraus,

    #[error("matrix is not Hermitian (‖M − M†‖_F = {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("state vector norm is {0}, expected 1")]
    InvalidNorm(f64),

    #[error("map is not completely positive: Choi eigenvalue {0:e} below −tol")]
    NotCompletelyPositive(f64),

    #[error("subspace dimension d_A = {dim_a} out of range for d = {dim}: need 1 ≤ d_A < d")]
    SplitDimension { dim: usize, dim_a: usize },

    #[error("basis is not an isometry (‖V†V − I‖_F = {0:e})")]
    NotIsometry(f64),

    #[error("could not complete basis: found {found} of {needed} complement vectors")]
    ComplementIncomplete { found: usize, needed: usize },

    #[error("subspace is not decoherence-free (second restricted-Choi eigenvalue {second_eigenvalue:e}, distance to unitary {channel_residual:e})")]
    NotDecoherenceFree {
        second_eigenvalue: f64,
        channel_residual: f64,
    },

    #[error("range condition fails: max bottom-block residual {0:e}")]
    RangeViolation(f64),

    #[error("invalid feedback protocol: {0}")]
    InvalidProtocol(String),

    #[error("invalid DFS channel spec: {0}")]
    InvalidSpec(String),

    #[error("whitening matrix stayed singular after {0} attempts")]
    SingularWhitening(usize),

    #[error("index {index} out of range (< {bound} required)")]
    IndexOutOfRange { index: usize, bound: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
