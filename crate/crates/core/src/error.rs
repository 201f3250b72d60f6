use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("Kleene star diverges: the matrix has a cycle of positive weight")]
    StarDiverges,
    #[error("the associated digraph has no cycle")]
    Acyclic,
    #[error("the associated digraph is not strongly connected")]
    Reducible,
    #[error("instance too large: n = {n} exceeds the limit {limit} for {what}")]
    TooLarge { n: usize, limit: usize, what: &'static str },
    #[error("invalid numbering: {0}")]
    InvalidNumbering(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no value found within the budget: {0}")]
    BudgetExhausted(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
