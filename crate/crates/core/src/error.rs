use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("vector is not in the ambient subspace")]
    NotInSubspace,

    #[error("algebra axiom violated: {0}")]
    Algebra(String),

    #[error("differential does not square to zero: {0}")]
    NotDg(String),

    #[error("not a chain map: {0}")]
    NotChainMap(String),

    #[error("algebra is not local: {0}")]
    NotLocal(String),

    #[error("guard order {guard} too small, need at least {needed}")]
    GuardTooSmall { guard: usize, needed: usize },

    #[error("{found} relations exceed dim Ext^2 = {bound}")]
    TooManyRelations { found: usize, bound: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid argument: {0}")]
    Invalid(String),
}

impl Error {
    /// True for errors that signal a broken internal invariant rather than
    /// bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, Error::Invariant(_) | Error::TooManyRelations { .. } | Error::NotDg(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
