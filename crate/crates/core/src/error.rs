use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),

    #[error("predicate `{predicate}` has arity {expected}, found {found} argument(s)")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("not a sentence: free variable(s) {}", .0.join(", "))]
    NotASentence(Vec<String>),

    #[error("formula must be ground and quantifier-free: {0}")]
    NotGroundQuantifierFree(String),

    #[error("ground atom `{0}` is not part of the world space")]
    UnknownGroundAtom(String),

    #[error("world space too large: {atoms} ground atoms exceeds the cap of {cap}")]
    WorldSpaceTooLarge { atoms: usize, cap: usize },

    #[error("quantifier expansion needs a nonempty constant domain")]
    EmptyDomain,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("formula is over a different signature than the distribution: {0}")]
    SignatureMismatch(String),

    #[error("invalid assertion `{assertion}`: {reason}")]
    InvalidAssertion { assertion: String, reason: String },

    #[error("inconsistent knowledge base: {note}")]
    Inconsistent { note: String, clashing: Vec<String> },

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid rational literal `{0}`")]
    InvalidRational(String),
}

pub type Result<T> = core::result::Result<T, Error>;
