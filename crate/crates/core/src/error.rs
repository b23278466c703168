use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unphysical Bloch vector: norm {norm} exceeds 1")]
    UnphysicalBloch { norm: f64 },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Conditional state is undefined because the postselection (almost) never succeeds.
    #[error("degenerate postselection: success probability {prob:e} is below threshold")]
    DegeneratePostselection { prob: f64 },

    /// Parameters lie outside the range where an approximate formula holds.
    #[error("outside validity regime: {0}")]
    Regime(String),

    #[error("the two states are identical; there is nothing to discriminate")]
    NoDiscrimination,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
