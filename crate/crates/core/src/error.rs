use thiserror::Error;

use crate::framework::TriangulationViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid circle ({x}, {y}, {r}): {reason}")]
    InvalidCircle {
        x: f64,
        y: f64,
        r: f64,
        reason: &'static str,
    },

    #[error("invalid Möbius map: {0}")]
    InvalidMoebius(String),

    /// An inversion stage sent the circle through its center, producing a line.
    #[error("inversion about ({qx}, {qy}) maps the circle to a line")]
    DegenerateImage { qx: f64, qy: f64 },

    #[error("invalid framework: {0}")]
    InvalidFramework(String),

    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(TriangulationViolation),

    #[error("could not orient faces consistently at face {face}")]
    OrientationFailure { face: usize },

    #[error("({0}, {1}) is not an edge of the framework")]
    NotAnEdge(usize, usize),

    #[error("perturbation size must be non-negative, got {0}")]
    InvalidEps(f64),

    #[error("scale assignment has a zero entry at edge index {0}")]
    ZeroScale(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("degenerate face ({0}, {1}, {2}): centers are collinear or coincident")]
    DegenerateFace(usize, usize, usize),

    #[error("no interstice point avoids every circle")]
    InversionDegenerate,

    #[error("labeling space of {labelings} exceeds the enumeration bound {bound}")]
    TooLarge { labelings: f64, bound: u64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
