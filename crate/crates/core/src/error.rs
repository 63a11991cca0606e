use thiserror::Error;

pub type Result<T> = std::result::Result<T, JetError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("chart dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("jet order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("order {requested} out of range (allowed {min}..={max})")]
    OrderOutOfRange { requested: usize, min: usize, max: usize },

    #[error("chart dimension must be at least 1")]
    ZeroDimension,

    #[error("base point mismatch")]
    BasePointMismatch,

    #[error("arrows do not chain: target of the first is not the source of the second")]
    ChainMismatch,

    #[error("linear part of the arrow is singular")]
    SingularLinearPart,

    #[error("form degree {degree} exceeds the allowed maximum {max}")]
    DegreeOverflow { degree: usize, max: usize },

    #[error("wrong number of arguments: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },

    #[error("structure jet has order {have}, at least {need} is required")]
    InsufficientJetOrder { have: usize, need: usize },

    #[error("order-0 part of the structure tensor is singular")]
    SingularStructure,

    #[error("a nondegenerate two-form needs even dimension, got {0}")]
    OddDimension(usize),

    #[error("structure two-form is not closed: {0}")]
    NotClosed(String),

    #[error("not a Lie algebra: {0}")]
    NotLieAlgebra(String),

    #[error("not a subalgebra: {0}")]
    NotSubalgebra(String),

    #[error("invalid extension data: {0}")]
    InvalidExtension(String),

    #[error("splitting test inapplicable: kernel is not abelian")]
    NonAbelianKernel,

    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(JetError::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_order(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(JetError::OrderMismatch { expected, found })
    }
}
