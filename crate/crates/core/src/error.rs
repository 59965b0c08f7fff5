use thiserror::Error;

/// Errors raised by the algebra layers and the campaign harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("operands belong to different rings or have the wrong shape: {0}")]
    ConfigMismatch(String),

    #[error("element is not a unit (valuation {0})")]
    NotAUnit(u32),

    /// The answer is not determined at the working precision. Callers may
    /// retry with a larger precision.
    #[error("precision p^{nprec} exhausted: {context}")]
    PrecisionExhausted { nprec: u32, context: String },

    #[error("lattice is not contained in the given super-lattice")]
    NotContained,

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn exhausted(nprec: u32, context: impl Into<String>) -> Self {
        Error::PrecisionExhausted {
            nprec,
            context: context.into(),
        }
    }

    pub fn is_precision(&self) -> bool {
        matches!(self, Error::PrecisionExhausted { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
