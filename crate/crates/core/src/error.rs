use alloc::string::String;

/// Errors raised by the appraisal pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("node {node_id}: non-finite displacement component")]
    NonFiniteComponent { node_id: u64 },
    #[error("duplicate node id {0}")]
    DuplicateNode(u64),
    #[error("a displacement field needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("empty magnitude set")]
    EmptyMagnitudes,
    #[error("no nonzero magnitudes remain after excluding zero-deformation nodes")]
    NoNonzeroMagnitudes,
    #[error("degenerate magnitude range: every counted magnitude equals {0}")]
    DegenerateRange(f64),
    #[error("bin count must be at least 2, got {0}")]
    TooFewBins(usize),
    #[error("degree must be at least 1, got {0}")]
    InvalidDegree(usize),
    #[error("segmentation point must lie strictly inside (0, 1), got {0}")]
    InvalidOmega(f64),
    #[error("basis index {index} out of range for {count} basis functions")]
    BasisIndexOutOfRange { index: usize, count: usize },
    #[error("curve parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("control polygon has {got} points, expected {expected}")]
    ControlCount { expected: usize, got: usize },
    #[error("non-finite control point coordinate")]
    NonFiniteControl,
    #[error("sample count must be at least 1")]
    ZeroSamples,
    #[error("at least 2 points are required for parameterization, got {0}")]
    TooFewPoints(usize),
    #[error("all points coincide; chord length is zero")]
    ZeroChordLength,
    #[error("consecutive points at index {0} coincide")]
    CoincidentPoints(usize),
    #[error("{rows} data points cannot determine {cols} control points")]
    Underdetermined { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no curve sample lies left of bin {0}; curve does not cover the bins")]
    UncoveredBin(usize),
    #[error("unknown zero policy {0:?}; expected include or exclude")]
    UnknownZeroPolicy(String),
    #[error("invalid omega grid: {0}")]
    InvalidGrid(&'static str),
    #[error("fitted signal has no positive area")]
    NonPositiveArea,
    #[error("ranking needs at least one report")]
    EmptyRanking,
    #[error("invalid synthetic spec: {0}")]
    InvalidSynthSpec(&'static str),
    #[error("case {case_id}: {source}")]
    Case {
        case_id: String,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    /// Attaches a case label to an error.
    pub fn in_case(self, case_id: &str) -> Self {
        match self {
            e @ Error::Case { .. } => e,
            e => Error::Case {
                case_id: case_id.into(),
                source: alloc::boxed::Box::new(e),
            },
        }
    }

    /// Innermost error, with case wrapping removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Case { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
