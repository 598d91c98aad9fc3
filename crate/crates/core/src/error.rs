use thiserror::Error;

/// Failures raised by the geometric kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("need at least {needed} points in dimension {dim}, have {have}")]
    TooFewPoints {
        needed: usize,
        have: usize,
        dim: usize,
    },
    #[error("non-finite coordinate or value at point {0}")]
    NonFinite(usize),
    #[error("points {first} and {second} coincide within the duplicate tolerance")]
    DuplicatePoint { first: usize, second: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("degenerate simplex {0:?}")]
    DegenerateSimplex(Vec<usize>),
    #[error("degenerate facet {0:?}")]
    DegenerateFacet(Vec<usize>),
    #[error("simplex walk exceeded {0} flips")]
    WalkDidNotTerminate(usize),
}

/// Crate-level error.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid bounding box: {0}")]
    InvalidBox(String),
    #[error("query point {index} lies outside the bounding box")]
    QueryOutsideBox { index: usize },
    #[error("only {survivors} points survive deduplication in dimension {dim}")]
    EmptyAfterDedup { survivors: usize, dim: usize },
    #[error("degenerate percentile interval in coordinate {0}")]
    DegenerateInterval(usize),
    #[error("unknown test function `{0}`")]
    UnknownFunction(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("schedule mismatch at k={k}: n_k {expected} vs {found}{}", source_name.as_deref().map(|s| format!(" in {s}")).unwrap_or_default())]
    ScheduleMismatch {
        k: usize,
        expected: usize,
        found: usize,
        source_name: Option<String>,
    },
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
