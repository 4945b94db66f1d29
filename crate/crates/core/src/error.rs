//! Error type shared by the whole crate.
//!
//! Operations are total where the mathematics is total; everything else
//! reports a structured error instead of panicking, so callers (and the CLI)
//! can distinguish bad input, failed verification, and exhausted caps.

use thiserror::Error;

use crate::shape::Shape;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A parameter is outside its permitted range (valency below 2, level-0
    /// ball, unusable leaf count, empty generator list, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Two values built over different tree shapes were combined.
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: Shape, found: Shape },

    /// Planar comparison was asked to order an address against one of its
    /// own prefixes; the left-to-right order is undefined there.
    #[error("planar order undefined: {first} is a prefix of {second}")]
    PrefixOrder { first: String, second: String },

    /// A depth-gap query left the rightmost branch.
    #[error("depth gap undefined: {0}")]
    Partiality(String),

    /// A prefix code contains two comparable (or equal) addresses.
    #[error("overlapping code: {first} and {second} are nested")]
    Overlap { first: String, second: String },

    /// A prefix code misses part of the boundary.
    #[error("incomplete code: nothing covers {missing_below}")]
    Incomplete { missing_below: String },

    /// Leaf images fail to form a bijection of codes.
    #[error("leaf map is not a bijection: {0}")]
    NotBijective(String),

    /// Text that does not match the expected grammar.
    #[error("syntax error: {0}")]
    Syntax(String),

    /// The leaf map cannot act on an address this shallow.
    #[error("address {address} is too shallow for this leaf map")]
    NotDeepEnough { address: String },

    /// A partition has a part on which the element is not a single prefix
    /// substitution.
    #[error("partition not admissible: element is not a homothety on {part}")]
    NotAdmissible { part: String },

    /// The refinement engine ran past its iteration cap.
    #[error("iteration cap exceeded ({cap})")]
    IterationCapExceeded { cap: u64 },

    /// A group closure ran past its size cap.
    #[error("size cap exceeded ({cap})")]
    SizeCapExceeded { cap: u64 },

    /// A certificate failed re-verification.
    #[error("invalid certificate: {0}")]
    Certificate(String),

    /// An experiment precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A verified construction or triple check failed; the message names the
    /// clause that broke.
    #[error("verification failed: {0}")]
    Verification(String),

    /// The requested construction is not defined at this shape.
    #[error("unsupported shape {shape}: {msg}")]
    UnsupportedShape { shape: Shape, msg: String },
}
