use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("confusion matrix cell `{cell}` is negative ({value})")]
    NegativeCell { cell: &'static str, value: i64 },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("precision is undefined when tp = fp = 0")]
    UndefinedPrecision,
    #[error("no positive examples")]
    NoPositives,
    #[error("dataset needs at least one positive and one negative (pos={pos}, neg={neg})")]
    DegenerateDataset { pos: u64, neg: u64 },
    #[error("group `{group}` needs at least one positive and one negative (pos={pos}, neg={neg})")]
    DegenerateGroup { group: String, pos: u64, neg: u64 },
    #[error("record {index} has no {field} identifier")]
    MissingGroupId { index: usize, field: &'static str },
    #[error("skew {0} must lie strictly between 0 and 1")]
    DegenerateSkew(f64),
    #[error("{name} = {value} is outside [0, 1]")]
    DomainError { name: &'static str, value: f64 },
    #[error("invalid recall range [{lo}, {hi}]; need 0 <= lo < hi <= 1")]
    InvalidRange { lo: f64, hi: f64 },
    #[error(
        "cutpoints must run from (0, 0) to (pos, neg) in strictly advancing, nondecreasing steps"
    )]
    InvalidCutpoints,
    #[error("input is empty")]
    EmptyInput,
    #[error("AUCPR {value} lies outside its achievable range [{min}, {max}]")]
    OutOfBounds { value: f64, min: f64, max: f64 },
    #[error("F-score is undefined when precision and recall are both 0")]
    UndefinedScore,
    #[error("beta must be positive and finite, got {0}")]
    InvalidBeta(f64),
    #[error("record {index} has non-finite score {score}")]
    NonFiniteScore { index: usize, score: f64 },
    #[error("grid step {0} must lie in (0, 0.1]")]
    InvalidGridStep(f64),
    #[error("invalid ratio `{0}`; expected p:n with both parts >= 1")]
    InvalidRatio(String),
    #[error("ratio {ratio} needs {needed} negatives but only {available} are available")]
    InsufficientNegatives {
        ratio: String,
        needed: u64,
        available: u64,
    },
    #[error("sweep cell (ratio {ratio}, seed {seed}): {source}")]
    SweepCell {
        ratio: String,
        seed: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Stable, machine-readable category name.
    pub fn category(&self) -> &'static str {
        match self {
            Error::NegativeCell { .. } => "NegativeCell",
            Error::EmptyDataset => "EmptyDataset",
            Error::UndefinedPrecision => "UndefinedPrecision",
            Error::NoPositives => "NoPositives",
            Error::DegenerateDataset { .. } => "DegenerateDataset",
            Error::DegenerateGroup { .. } => "DegenerateGroup",
            Error::MissingGroupId { .. } => "MissingGroupId",
            Error::DegenerateSkew(_) => "DegenerateSkew",
            Error::DomainError { .. } => "DomainError",
            Error::InvalidRange { .. } => "InvalidRange",
            Error::InvalidCutpoints => "InvalidCutpoints",
            Error::EmptyInput => "EmptyInput",
            Error::OutOfBounds { .. } => "OutOfBounds",
            Error::UndefinedScore => "UndefinedScore",
            Error::InvalidBeta(_) => "InvalidBeta",
            Error::NonFiniteScore { .. } => "NonFiniteScore",
            Error::InvalidGridStep(_) => "InvalidGridStep",
            Error::InvalidRatio(_) => "InvalidRatio",
            Error::InsufficientNegatives { .. } => "InsufficientNegatives",
            Error::SweepCell { source, .. } => source.category(),
        }
    }
}
