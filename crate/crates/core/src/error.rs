use thiserror::Error;

/// Errors raised by the algebra, alloy and representation routines.
///
/// Failed *checks* (a representation that does not satisfy its relations, a
/// factorization that does not factor) are reported through report structs,
/// not through this type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error(
        "non-diagonalizable: eigenvalue cluster near {eigenvalue} has algebraic multiplicity \
         {algebraic} but eigenspace dimension {geometric}"
    )]
    NonDiagonalizable {
        eigenvalue: String,
        algebraic: usize,
        geometric: usize,
    },

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("not strict: {0}")]
    NotStrict(String),

    #[error("not transversal: images intersect in a subspace of dimension {0}")]
    NotTransversal(usize),

    #[error("not cross-projective: defect of pair ({i}, {j}) in part {part} leaves the span (residual {residual:e})")]
    NotCrossProjective {
        part: usize,
        i: usize,
        j: usize,
        residual: f64,
    },

    #[error("invalid alloy: {0}")]
    InvalidAlloy(String),

    #[error("representations belong to different alloys")]
    AlloyMismatch,

    #[error("invalid representation: worst residual {0:e}")]
    InvalidRepresentation(f64),

    #[error("decomposition failed after {0} draws (commutant element never split the space)")]
    DecompositionFailed(usize),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn mismatch(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
