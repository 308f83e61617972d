use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("coordinate x{index} out of range for dimension {m} (byte {offset})")]
    CoordinateOutOfRange { index: usize, m: usize, offset: usize },

    #[error("domain error in {op}: argument {value}")]
    Domain { op: &'static str, value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("sign of mu is not constant over the sample set")]
    MixedSign,
}

impl Error {
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
