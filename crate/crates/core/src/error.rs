use thiserror::Error;

/// Errors produced by graph construction and the probability engines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    Input(String),

    /// Exhaustive enumeration was requested over too many random edges.
    #[error("enumeration over {m} random edges exceeds the cutoff of {cutoff}")]
    Capacity { m: usize, cutoff: usize },

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A configuration was used with a graph it was not sampled for.
    #[error("configuration does not belong to this bunkbed graph")]
    Mismatch,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
