use std::fmt;

use thiserror::Error;

/// Pipeline stage names used for failure attribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Matching,
    Rejection,
    Registration,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Matching => write!(f, "matching"),
            Stage::Rejection => write!(f, "rejection"),
            Stage::Registration => write!(f, "registration"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite position in vertex {index}")]
    NonFinitePosition { index: usize },

    #[error("vertex id {id} out of range for graph with {len} vertices")]
    VertexOutOfRange { id: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid depth: blob depth must be positive, got {0}")]
    InvalidDepth(f64),

    #[error("label {label} out of range for label count {count}")]
    LabelOutOfRange { label: u32, count: usize },

    #[error("descriptor mismatch: {0}")]
    DescriptorMismatch(String),

    #[error("empty match set")]
    EmptyMatchSet,

    #[error("match set of size {size} exceeds exhaustive-search limit {limit}")]
    SizeLimitExceeded { size: usize, limit: usize },

    #[error("need at least {need} matches, got {got}")]
    TooFewMatches { got: usize, need: usize },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("no model: best consensus has {best} inliers, need {need}")]
    NoModel { best: usize, need: usize },

    #[error("infeasible scenario: {0}")]
    InfeasibleScenario(String),

    #[error("localization failed at {stage} stage: {detail}")]
    LocalizationFailure { stage: Stage, detail: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
}

impl Error {
    /// True when the error means "the pipeline ran but found no consistent
    /// solution" rather than "the input was malformed". The CLI maps these
    /// to a distinct exit code.
    pub fn is_localization_failure(&self) -> bool {
        matches!(self, Error::LocalizationFailure { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
