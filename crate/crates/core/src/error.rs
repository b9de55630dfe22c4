use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid cycle type: {0}")]
    InvalidCycleType(String),

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("partition size k={0} is outside the supported range 1..=12")]
    PartitionSizeOutOfRange(usize),

    #[error("invalid set partition: {0}")]
    InvalidPartition(String),

    #[error("invalid Bell signature: {0}")]
    InvalidSignature(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    /// An exact enumeration would exceed its candidate limit.
    #[error("enumeration infeasible: {what} needs {needed} candidates, limit is {limit}")]
    Infeasible {
        what: &'static str,
        needed: String,
        limit: u64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },
}

impl Error {
    pub(crate) fn parse(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            reason: reason.into(),
        }
    }
}
