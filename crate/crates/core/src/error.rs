use thiserror::Error;

/// Errors surfaced by evaluation, tree maintenance, encoders and the test kit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Data points still share a cell at `max_depth`; they cannot be told
    /// apart at the configured resolution.
    #[error("indistinguishable data points at depth {depth}")]
    DuplicateData { depth: u32 },

    #[error("value {0} is not stored in the tree")]
    NotFound(f64),

    /// Skeleton enumeration grows doubly exponentially in depth.
    #[error("skeleton enumeration refused for depth {0}; the largest supported depth is 4")]
    OracleDepthTooLarge(u32),

    #[error("unknown test distribution {0:?}")]
    UnknownDistribution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
