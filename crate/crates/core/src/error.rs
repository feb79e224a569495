use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{what} exceeds configured limit ({value} > {limit})")]
    LimitExceeded {
        what: &'static str,
        value: u128,
        limit: u128,
    },

    #[error("size mismatch: {left} != {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("polynomial is not monic")]
    NonMonic,

    #[error("products of the two sides differ")]
    ProductMismatch,

    #[error("need at least {need} sample points, got {got}")]
    InsufficientSamples { need: usize, got: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// True for errors caused by a resource cap rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::LimitExceeded { .. })
    }
}
