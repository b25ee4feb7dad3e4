use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge endpoint {label} out of range 1..={n}")]
    EndpointOutOfRange { label: usize, n: usize },
    #[error("loop edge at vertex {0}")]
    LoopEdge(usize),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph has {n} vertices, above the bound {bound}")]
    SizeBoundExceeded { n: usize, bound: usize },
    #[error("invalid cycle length {0} (must be at least 3)")]
    InvalidCycleLength(usize),
    #[error("minor pattern has {0} vertices, above the search bound")]
    PatternTooLarge(usize),
    #[error("minor pattern is disconnected")]
    PatternDisconnected,
    #[error("graph is not 2-connected")]
    NotTwoConnected,
    #[error("graph is not in the class {0}")]
    NotInClass(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("optional edge {flag} not admitted: {reason}")]
    InvalidOption { flag: String, reason: String },
    #[error("size {n} out of the supported range for {what}")]
    OutOfRange { what: String, n: usize },
    #[error("not enough pendant vertices: need {needed}, have {available}")]
    InsufficientPendants { needed: usize, available: usize },
    #[error("maximum degree {degree} is not below the bad-graph threshold {threshold}")]
    DegreeTooHigh { degree: usize, threshold: usize },
    #[error("no vertex has degree above the threshold {0:.3}")]
    NoHighDegreeVertex(f64),
    #[error("identification failed: {0}")]
    IdentificationFailed(String),
    #[error("count table does not cover n = {n} (table covers up to {max})")]
    TableTooSmall { n: usize, max: usize },
    #[error("sampler unavailable: {0}")]
    SamplerUnavailable(String),
    #[error("class mismatch: {0}")]
    ClassMismatch(String),
    #[error("normalizer undefined at n = {0}")]
    NormalizerUndefined(usize),
    #[error("empty input")]
    EmptyInput,
    #[error("non-positive entry {0}")]
    NonPositiveEntry(i64),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable variant name, printed by the command line front end.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EndpointOutOfRange { .. } => "EndpointOutOfRange",
            Error::LoopEdge(_) => "LoopEdge",
            Error::VertexOutOfRange(_) => "VertexOutOfRange",
            Error::EmptyGraph => "EmptyGraph",
            Error::SizeBoundExceeded { .. } => "SizeBoundExceeded",
            Error::InvalidCycleLength(_) => "InvalidCycleLength",
            Error::PatternTooLarge(_) => "PatternTooLarge",
            Error::PatternDisconnected => "PatternDisconnected",
            Error::NotTwoConnected => "NotTwoConnected",
            Error::NotInClass(_) => "NotInClass",
            Error::InvalidParameters(_) => "InvalidParameters",
            Error::InvalidOption { .. } => "InvalidOption",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::InsufficientPendants { .. } => "InsufficientPendants",
            Error::DegreeTooHigh { .. } => "DegreeTooHigh",
            Error::NoHighDegreeVertex(_) => "NoHighDegreeVertex",
            Error::IdentificationFailed(_) => "IdentificationFailed",
            Error::TableTooSmall { .. } => "TableTooSmall",
            Error::SamplerUnavailable(_) => "SamplerUnavailable",
            Error::ClassMismatch(_) => "ClassMismatch",
            Error::NormalizerUndefined(_) => "NormalizerUndefined",
            Error::EmptyInput => "EmptyInput",
            Error::NonPositiveEntry(_) => "NonPositiveEntry",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
