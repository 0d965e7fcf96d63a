use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },
    #[error("{op} is singular at the origin in d = {d}")]
    Singular { op: &'static str, d: u8 },
    #[error("pole: {0}")]
    Pole(String),
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("root solve failed at step {step} after {iterations} iterations")]
    RootSolve { step: usize, iterations: usize },
    #[error("degenerate implicit step at step {step}")]
    Degenerate { step: usize },
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("fit degenerate: {0}")]
    FitDegenerate(String),
    #[error("overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain { op, msg: msg.into() }
}
