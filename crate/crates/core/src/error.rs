use crate::rational::ParseRationalError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("dimension {0} exceeds the supported maximum of 3")]
    DimensionTooLarge(usize),
    #[error("polytope is not reflexive")]
    NotReflexive,
    #[error("integrand degree {0} exceeds the supported maximum of 4")]
    DegreeUnsupported(usize),
    #[error("Gram matrix is singular")]
    SingularGram,
    #[error("linear program is unbounded: {0}")]
    Unbounded(String),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("too many pieces: {0} (cap {1})")]
    TooManyPieces(usize, usize),
    #[error("budget exhausted after {0} candidates")]
    BudgetExhausted(usize),
    #[error("unknown catalog entry {0:?}")]
    UnknownCatalogEntry(String),
    #[error(transparent)]
    Parse(#[from] ParseRationalError),
    #[error("invalid input: {0}")]
    Invalid(String),
}
