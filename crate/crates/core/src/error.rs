use thiserror::Error;

/// Errors produced by derivation, evaluation and field I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("singular matrix: no nonzero pivot in column {column}")]
    SingularMatrix { column: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid spline order n = {n}: {reason}")]
    InvalidOrder { n: usize, reason: String },

    #[error("invalid spline kind (n = {n}, q = {q}): {reason}")]
    InvalidKind { n: usize, q: usize, reason: String },

    #[error("invalid stencil half-width g = {0}, must be at least 1")]
    InvalidHalfWidth(usize),

    #[error("derivative order {order} exceeds the smoothness order m = {max}")]
    DerivativeTooHigh { order: usize, max: usize },

    #[error("stencil leaves the grid along axis {axis}: nodes {first}..={last} not within 0..{extent}")]
    OutOfDomain {
        axis: usize,
        first: i64,
        last: i64,
        extent: usize,
    },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error("could not parse rational {0:?}")]
    ParseRational(String),

    #[error("unknown test function {0:?}")]
    UnknownFunction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
