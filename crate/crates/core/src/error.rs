use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A range or size that cannot be represented or allocated.
    #[error("sizing error: {0}")]
    Sizing(String),

    /// A table does not cover the integers a computation needs.
    #[error(
        "table for {function} covers [{have_lo}, {have_hi}) but [{need_lo}, {need_hi}) is required"
    )]
    Coverage {
        function: String,
        have_lo: u64,
        have_hi: u64,
        need_lo: u64,
        need_hi: u64,
    },

    #[error("checkpoint {checkpoint} lies outside the summable range [1, {hi}]")]
    Checkpoint { checkpoint: u64, hi: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed table file: {0}")]
    Format(String),

    /// The memory estimate for a run exceeds the configured budget.
    #[error("refused: estimated {estimate_bytes} bytes exceeds budget of {budget_bytes} bytes")]
    Budget {
        estimate_bytes: u64,
        budget_bytes: u64,
    },

    /// A computed invariant did not hold. Always a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
