use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid cyclic factor {0}: factors must be positive")]
    InvalidFactor(i64),

    #[error("element has {got} residues but the group has {expected} cyclic factors")]
    ResidueCount { expected: usize, got: usize },

    #[error("flat index {index} is outside a group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("operands belong to different groups ({left} vs {right})")]
    GroupMismatch { left: String, right: String },

    #[error("subgroup enumeration exceeds the configured bound: {what} is {value}, limit {limit}")]
    EnumerationTooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("empty element set")]
    EmptySet,

    #[error("state has dimension {got}, group order is {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("duplicate training input at flat index {0}")]
    DuplicateSample(usize),

    #[error("labels are inconsistent with the coset structure: {0}")]
    InconsistentLabels(String),

    #[error("weights must be non-negative and sum to 1 (sum = {sum})")]
    InvalidWeights { sum: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("parameter `{name}` out of range: {reason}")]
    OutOfRange { name: &'static str, reason: String },

    #[error("representatives do not form a transversal of the subgroup: {0}")]
    InvalidTransversal(String),

    #[error("candidate list is empty")]
    NoCandidates,

    #[error("too many pairs for exhaustive labelling: {got} > {cap}")]
    ShatteringCapExceeded { got: usize, cap: usize },

    #[error("exhaustive shattering ({exhaustive}) disagrees with difference-set independence ({independent})")]
    ShatteringDisagreement { exhaustive: bool, independent: bool },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
