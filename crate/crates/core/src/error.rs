use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid minimal polynomial: {0}")]
    InvalidModulus(String),

    #[error("operands belong to different fields")]
    FieldMismatch,

    #[error("division by zero")]
    DivisionByZero,

    #[error("expected a positive input, got {0}")]
    NonPositive(String),

    #[error("entry {0} is zero")]
    ZeroEntry(usize),

    #[error("unsupported base field: {0}")]
    UnsupportedBase(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("operands belong to different algebras")]
    AlgebraMismatch,

    #[error("matrix violates the required symmetry at entry ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("broken invariant: {0}")]
    BrokenInvariant(String),

    #[error("no reference form found within bound {0}")]
    NoReferenceForm(i64),

    #[error("reference form belongs to a different algebra")]
    ReferenceMismatch,

    #[error("out of scope: {0}")]
    Scope(String),

    #[error("element is not invertible")]
    NotInvertible,

    #[error("certificate weight #{term} is not positive at ordering {ordering}")]
    WeightNotPositive { term: usize, ordering: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;
