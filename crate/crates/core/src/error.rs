//! Error taxonomy shared by all modules.

use thiserror::Error;

/// Failure modes surfaced by constructors, decompositions, and checks.
///
/// Numeric payloads are reported in `f64` regardless of the working scalar
/// type; they are diagnostics, not inputs to further arithmetic.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: ||m - m^H||_F = {deviation:.3e} exceeds {tol:.1e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("shape mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("not a probability distribution: {reason}")]
    NotDistribution { reason: String },

    #[error("density-matrix validation failed: {reason}")]
    InvalidState { reason: String },

    #[error("observable validation failed: {reason}")]
    InvalidObservable { reason: String },

    #[error("mixture validation failed: {reason}")]
    InvalidMixture { reason: String },

    #[error("state is not pure: largest eigenvalue {largest:.12}")]
    NotPure { largest: f64 },

    #[error("observable is not a refinement of the reference: {reason}")]
    NotARefinement { reason: String },

    #[error("decomposition blocks do not commute: {context}")]
    BlocksDoNotCommute { context: String },

    #[error("unsupported dimension {dim}: {context}")]
    UnsupportedDimension { dim: usize, context: String },

    #[error("{what}: residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    ToleranceExceeded {
        what: String,
        residual: f64,
        tol: f64,
    },

    #[error("unknown fixture: {name}")]
    UnknownFixture { name: String },
}

pub type Result<T> = core::result::Result<T, Error>;
