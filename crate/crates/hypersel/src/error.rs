use thiserror::Error;

/// Errors surfaced by the framework.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: left has {left} coefficients, right has {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unsupported hypercomplex dimension {0}, expected one of 1, 2, 4, 8")]
    BadDimension(usize),

    #[error("norm order p must be >= 1, got {0}")]
    BadNormOrder(f64),

    #[error("bounds must satisfy lower < upper, got [{lower}, {upper}]")]
    BadBounds { lower: f64, upper: f64 },

    #[error("Levy stability exponent must lie in (0, 2], got {0}")]
    BadLevyBeta(f64),

    #[error("unknown algorithm '{0}', expected abc|aiwpso|ba|cs|fa|fpa|pso")]
    UnknownAlgorithm(String),

    #[error("unknown space '{0}', expected std|quat|oct")]
    UnknownSpace(String),

    #[error("training set contains a single class; at least two are required")]
    SingleClass,

    #[error("class {class} has {count} samples; stratified split needs at least 4")]
    ClassTooSmall { class: usize, count: usize },

    #[error("empty test set")]
    EmptyTestSet,

    #[error("dataset '{0}' is empty")]
    EmptyDataset(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("sample length {got} does not match feature count {want}")]
    SampleWidth { got: usize, want: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("objective evaluation failed: {0}")]
    Objective(String),

    #[error("paired samples must have equal nonzero length, got {left} and {right}")]
    BadPairedSample { left: usize, right: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
