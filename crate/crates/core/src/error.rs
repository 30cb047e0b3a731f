use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unassigned variable `{0}`")]
    UnassignedVariable(String),
    #[error("quantifier encountered during ground evaluation")]
    QuantifierInGroundEvaluation,
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("substitution would capture bound variable `{0}`")]
    VariableCapture(String),
    #[error("nonlinear occurrence: {0}")]
    NonlinearOccurrence(String),
    #[error("expected a quantifier-free formula")]
    NotQuantifierFree,
    #[error("formula is unsatisfiable")]
    UnsatInput,
    #[error("parse error {0}")]
    Parse(String),
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no strategy condition matches state {0}")]
    NoMatchingCondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
