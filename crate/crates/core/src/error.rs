use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    /// Runtime failure while evaluating a parsed expression (division by
    /// zero, sqrt of a negative value, non-differentiable point). The message
    /// names the offending subexpression.
    #[error("evaluation error: {0}")]
    Eval(String),

    /// An interior curve node sits on the zero set of `W`.
    #[error("degenerate interior: W = {w:.3e} < 1e-14 at node {index}")]
    DegenerateInterior { index: usize, w: f64 },

    /// A segment midpoint sits on the zero set of `W`.
    #[error("degenerate midpoint: W = {w:.3e} < 1e-14 at segment {index}")]
    DegenerateMidpoint { index: usize, w: f64 },

    #[error("solver error at iteration {iteration}: {message}")]
    Solver { iteration: usize, message: String },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("unsupported dimension {0}: the grid oracle handles N = 2 or 3")]
    UnsupportedDimension(usize),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
