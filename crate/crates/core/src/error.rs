use thiserror::Error;

/// Errors raised by geometry, function, valuation and interchange operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported ambient dimension {0} (supported: 1..=6)")]
    UnsupportedDimension(usize),

    #[error("non-finite coordinate or coefficient")]
    NonFinite,

    #[error("degenerate simplex: |det| = {det:e} is below {threshold:e}")]
    DegenerateSimplex { det: f64, threshold: f64 },

    #[error("expected {expected} simplex vertices, found {found}")]
    SimplexVertexCount { expected: usize, found: usize },

    #[error("matrix is not in SL(n): |det - 1| = {deviation:e} exceeds {tolerance:e}")]
    NotSpecialLinear { deviation: f64, tolerance: f64 },

    #[error("matrix must be square, found {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("random polytope draw stayed lower-dimensional after {attempts} attempts")]
    DegenerateDraw { attempts: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid functions live on different grids (delta {left} vs {right}, dim {left_dim} vs {right_dim})")]
    GridMismatch {
        left: f64,
        right: f64,
        left_dim: usize,
        right_dim: usize,
    },

    #[error("pieces {first} and {second} overlap in an interior region of volume {volume:e}")]
    OverlappingInteriors {
        first: usize,
        second: usize,
        volume: f64,
    },

    #[error("approximating set is not contained in the target polytope and no ball radius was supplied")]
    ContainmentViolation,

    #[error("rotation term s = {s} is only admissible for n = 2 (n >= 3 valuations have the form K(xi o h)); found n = {n}")]
    RotationInHighDim { n: usize, s: f64 },

    #[error("support polytope is lower-dimensional, so its moment matrix vanishes")]
    DegenerateSupport,

    #[error("coefficients mix signs; decomposition requires all >= 0 or all <= 0")]
    MixedSigns,

    #[error("invalid composition function: {0}")]
    InvalidComposition(String),

    #[error("expression parse error at column {column}: {message}")]
    Expression { column: usize, message: String },

    #[error("invalid document: {0}")]
    Document(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Document(err.to_string())
    }
}
