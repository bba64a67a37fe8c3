use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("invalid ring parameter: {0}")]
    InvalidParameter(String),
    #[error("ring has {size} elements, above the cap of {cap}")]
    RingTooLarge { size: usize, cap: usize },
    #[error("ring axiom fails: {0}")]
    RingAxiom(String),
    #[error("involution axiom fails: {0}")]
    Involution(String),
    #[error("invalid epsilon: {0}")]
    Epsilon(String),
    #[error("form parameter invalid: {0}")]
    FormParameter(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("map is not well defined: {0}")]
    IllDefined(String),
    #[error("quadratic module axiom ({axiom}) fails at {location}")]
    QuadraticAxiom { axiom: String, location: String },
    #[error("precondition fails: {0}")]
    Precondition(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("internal failure: {0}")]
    Internal(String),
    #[error("mismatched ring or parameter")]
    Mismatch,
}

pub type Result<T> = std::result::Result<T, AlgebraError>;
