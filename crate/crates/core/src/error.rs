use thiserror::Error;

/// Errors raised by the constructions and checkers in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input has the wrong shape (non-square matrix, ragged point list, ...).
    #[error("structural error: {0}")]
    Structural(String),

    /// A numeric parameter lies outside the operation's precondition.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The exact multiplicity search refused an instance above its point budget.
    #[error("capacity exceeded: {points} points > budget {budget}; use the ball-based multiplicity")]
    Capacity { points: usize, budget: usize },

    /// An input covering does not satisfy the contract the operation relies on.
    #[error("contract violated: {0}")]
    Contract(String),

    /// A construction produced an object failing its own invariants.
    #[error("construction failed: {0}")]
    Construction(String),

    /// A certified inequality failed on a concrete witness.
    #[error("certification failed: {0}")]
    Certification(String),

    /// An internal invariant was violated.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// Input text could not be decoded.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
