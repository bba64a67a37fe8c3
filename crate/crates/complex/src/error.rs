use thiserror::Error;
use wittlab_core::AlgebraError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("sequence is not a member: {0}")]
    NotMember(String),
    #[error("hypothesis fails: {0}")]
    Hypothesis(String),
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("internal failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, ComplexError>;
