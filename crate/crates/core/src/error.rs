use thiserror::Error as ThisError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, ThisError)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid arity {0}: iterated coproduct needs n >= -1")]
    InvalidArity(i64),
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("partition sums to {found} but the graph has {expected} vertices")]
    PartitionMismatch { expected: usize, found: usize },
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("enumeration bound exceeded: n = {n} > {bound}")]
    BoundExceeded { n: usize, bound: usize },
    #[error("slot {slot} out of range for arity {arity}")]
    SlotOutOfRange { slot: usize, arity: usize },
    #[error("module has no product")]
    NoProduct,
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid specification: {0}")]
    Validation(String),
    #[error("not invariant under the symmetric group: {0}")]
    InvarianceViolation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
