use std::path::PathBuf;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-pure complex: simplex {index} has {found} vertices, expected {expected}")]
    NonPureComplex { index: usize, found: usize, expected: usize },
    #[error("vertex {0} is not used by any simplex")]
    DanglingVertex(u32),
    #[error("simplex {0} is listed twice or repeats a vertex")]
    DuplicateSimplex(usize),
    #[error("vertex id {id} out of range (complex has {count} vertices)")]
    InvalidVertex { id: u32, count: usize },
    #[error("empty complex")]
    EmptyComplex,
    #[error("seed chamber {0} is not in the allowed set")]
    SeedNotAllowed(u32),
    #[error("removal ball does not fit strictly inside the patch minus its margin")]
    RemovalOutOfBounds,
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),
    #[error("construction leaves the patch minus its margin at vertex {0}")]
    EscapesMargin(u32),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid simplicial map: {0}")]
    InvalidMap(String),
    #[error("domain is not a manifold: {0}")]
    NotManifold(String),
    #[error("operation is not implemented in dimension {0}")]
    UnsupportedDimension(usize),
    #[error("complex is disconnected")]
    Disconnected,
    #[error("no pushable vertex left on the cone front ({remaining} vertices away from the apex)")]
    RectangleNotStarFillable { remaining: usize },
    #[error("ambient model does not support exact fills")]
    UnsupportedAmbient,
    #[error("empty family")]
    EmptyFamily,
    #[error("no cap filling available for a boundary circle")]
    CapFillUnavailable,
    #[error("remainder volume {after} did not shrink by theta from {before}")]
    NonDecayingRemainder { before: usize, after: usize },
    #[error("vertex {0} is not in the folded set")]
    NotFoldedVertex(u32),
    #[error("iteration cap {0} exceeded")]
    NonTerminating(usize),
    #[error("no volume-free annulus found for scan window [{lo}, {hi}]")]
    NoEmptyAnnulus { lo: u32, hi: u32 },
    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("non-positive value {0} in log-log fit")]
    NonPositiveValue(f64),
    #[error("no records to plot")]
    EmptyRecords,
    #[error("certificate check failed: {0}")]
    CertificateInvalid(String),
    #[error("assertion failed: {0}")]
    AssertionFailed(String),
    #[error("experiment {id}, size {size}: {source}")]
    Experiment { id: String, size: u32, source: Box<Error> },
    #[error("config: {0}")]
    Config(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: &str, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.to_string(), line, msg: msg.into() }
    }
}
