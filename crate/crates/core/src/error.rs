use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants split into two families: input that violates a type invariant
/// (wrong shape, not a projection, not trace preserving, malformed document)
/// and a mathematical precondition that does not hold for otherwise valid
/// inputs (a projection outside the algebra, a matrix already in the space).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("entry count {got} does not match {rows}x{cols}")]
    EntryCount {
        rows: usize,
        cols: usize,
        got: usize,
    },

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("matrix is not an orthogonal projection (deviation {0:e})")]
    NotProjection(f64),

    #[error("matrix is not an isometry (deviation {0:e})")]
    NotIsometry(f64),

    #[error("Kraus family fails trace preservation (deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("Kraus family is empty")]
    EmptyKraus,

    #[error("not a column-stochastic matrix: {0}")]
    NotStochastic(String),

    #[error("dimension {dim} is not a multiple of {base}")]
    LevelMismatch { dim: usize, base: usize },

    #[error("index ({0}, {1}) out of range for size {2}")]
    IndexOutOfRange(usize, usize, usize),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("nothing to join")]
    EmptyJoin,

    #[error("{0} is not in the algebra")]
    NotInAlgebra(&'static str),

    #[error("space is not a bimodule over the commutant")]
    NotBimodule,

    #[error("relation is not a quantum graph (reflexive and symmetric)")]
    NotQuantumGraph,

    #[error("matrix lies in the space; no separating witness exists")]
    InSpace,

    #[error("projection has rank zero")]
    ZeroRank,

    #[error("invalid document at {path}: {message}")]
    Format { path: String, message: String },
}

impl Error {
    /// True when the inputs were well formed but a mathematical
    /// precondition of the operation failed.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::NotInAlgebra(_)
                | Error::NotBimodule
                | Error::NotQuantumGraph
                | Error::InSpace
                | Error::ZeroRank
        )
    }

    pub(crate) fn format(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
