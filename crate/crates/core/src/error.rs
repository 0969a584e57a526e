use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("operation requires an irreducible shift space")]
    RequiresIrreducible,
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("degenerate experiment: {0}")]
    DegenerateExperiment(String),
    #[error("integer overflow while counting {0}")]
    Overflow(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
