use thiserror::Error;

/// Failure modes shared by every estimator, generator and harness in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Too few observations (or index pairs) remain to form the statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The collision entropy is undefined because no close pair was found.
    #[error("undefined entropy: no epsilon-close pairs (epsilon {epsilon} is too small for this sample)")]
    UndefinedEntropy { epsilon: f64 },

    /// The requested quantity has no oracle or implementation for these inputs.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Too many Monte Carlo replications failed to produce an estimate.
    #[error("{failed} of {reps} replications failed at n = {n}: {first}")]
    ReplicationFailures {
        n: usize,
        failed: usize,
        reps: usize,
        first: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
