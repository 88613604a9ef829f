use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("arity {0} is outside the supported range 1..=5")]
    InvalidArity(usize),
    #[error("tuple repeats vertex {0}")]
    DuplicateEntry(usize),
    #[error("vertex {vertex} is out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("relation {0} needs a base 4-ary relation")]
    MissingBaseRelation(String),
    #[error("unknown relation name {0:?}")]
    UnknownRelation(String),
    #[error("unknown generator label {0:?}")]
    UnknownLabel(String),
    #[error("parameter {param} out of range for {what}")]
    ParamOutOfRange { what: String, param: usize },
    #[error("generator {0} has no concrete graph-level transform")]
    NotConcrete(char),
    #[error("type code {code} does not exist for arity {arity}")]
    InvalidCode { code: u32, arity: usize },
    #[error("pattern on {0} vertices does not embed into the host graph")]
    HostTooSmall(usize),
    #[error("placement is inconsistent with slot levels: {0}")]
    InconsistentPlacement(String),
    #[error("exhaustive constellation enumeration is limited to 3 slots (got {0})")]
    SizeLimit(usize),
    #[error("no dihedral-closed surrogate for the S^D column exists")]
    SurrogateSearchFailure,
    #[error("classification violated: {0}")]
    ClassificationViolation(String),
    #[error("unknown case {0:?}")]
    UnknownCase(String),
}

pub type Result<T> = std::result::Result<T, Error>;
