//! Finite groups, spherical systems of generators, singularity counts,
//! Hurwitz orbits and fundamental groups of quotients of `C x C` by
//! mixed group actions.

pub mod acceptance;
pub mod aut;
pub mod candidate;
pub mod catalog;
pub mod enumerate;
pub mod group;
pub mod mixed;
pub mod orbits;
pub mod perm;
pub mod pi1;
pub mod pipeline;
pub mod report;
pub mod singular;
pub mod spherical;
pub mod verify;

pub use group::{FiniteGroup, Subgroup};
pub use mixed::{mixed_structures, MixedStructure};
pub use perm::Perm;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{what} exceeds the limit of {limit}")]
    Capacity { what: &'static str, limit: usize },
}

impl GroupError {
    /// Attaches a line number to a parse error.
    pub fn at_line(self, line: usize) -> GroupError {
        match self {
            GroupError::Parse { message, .. } => GroupError::Parse { line, message },
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error("K^2 = {0} is outside 1..=8")]
    K2OutOfRange(u32),
    #[error("basket {basket:?} does not occur for K^2 = {k2}")]
    InvalidBasket { k2: u32, basket: enumerate::Basket },
    #[error("signature {signature:?} with |G0| = {order} gives a non-integral genus")]
    NonIntegralGenus { signature: Vec<u32>, order: u64 },
    #[error("inconsistent singularity data: {0}")]
    Inconsistent(String),
    #[error("move index {i} out of range for a tuple of length {len}")]
    MoveOutOfRange { i: usize, len: usize },
    #[error("orbit enumeration exceeded {0} states")]
    OrbitOverflow(usize),
    #[error("group {name} claims order {claimed} but generates {actual}")]
    OrderMismatch {
        name: String,
        claimed: usize,
        actual: usize,
    },
    #[error("duplicate catalog name {0}")]
    DuplicateName(String),
    #[error("bad family parameters: {0}")]
    Parameters(String),
    #[error("bad action: {0}")]
    Action(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}
