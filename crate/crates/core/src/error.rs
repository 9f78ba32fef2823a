//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the engine.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated an operation's precondition (bad index, shape
    /// mismatch, empty input, non-terminal state, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Sum-of-squares scoring is undefined when every count is zero.
    #[error("undefined score: all supply-center counts are zero")]
    UndefinedScore,

    /// A joint action contained an order that is illegal in the given state.
    #[error("rejected joint action: {0}")]
    RejectedAction(String),

    /// Exact best response requires an oracle whose expected utilities can be
    /// enumerated; Monte Carlo oracles must be matrixized first.
    #[error("oracle does not support exact enumeration; matrixize the subgame first")]
    UnsupportedOracle,

    /// Gradient descent produced a non-finite loss.
    #[error("divergence at step {step}: loss is not finite")]
    Divergence { step: usize },

    /// Invalid experiment or agent configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
