use thiserror::Error;

/// Errors raised by relation construction, operation building, solving and
/// the reductions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("tuple has arity {found}, expected {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("value {value} out of range for domain size {domain_size}")]
    ValueOutOfRange { value: u32, domain_size: u32 },
    #[error("index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("domain size {0} is not supported (need at least 2)")]
    BadDomainSize(u32),
    #[error("domain size mismatch: {left} vs {right}")]
    DomainMismatch { left: u32, right: u32 },
    #[error("operation requires a Boolean domain")]
    NotBoolean,
    #[error("relation is not totally symmetric")]
    NotSymmetric,
    #[error("table of {0} entries exceeds the dense-representation cap")]
    TooLarge(u128),
    #[error("enumeration of {0} candidates exceeds the feasibility guard")]
    Infeasible(u128),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("pattern is inconsistent: {0}")]
    InconsistentPattern(String),
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("assignment is not extendable in the projection")]
    NotExtendable,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
