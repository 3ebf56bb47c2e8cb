use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("variable count mismatch: {left} vs {right}")]
    VariableMismatch { left: usize, right: usize },
    #[error("the zero polynomial has no sign profile")]
    ZeroPolynomial,
    #[error("precondition failed: {reason} (witness {witness:?})")]
    Precondition { reason: String, witness: Vec<f64> },
    #[error("regularity check failed for {case}: witness {witness:?}")]
    RegularityFailed { case: String, witness: Vec<f64> },
    #[error("regularity undecided for {case}: {reason}")]
    RegularityUndecided { case: String, reason: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("sampling: {0}")]
    Sampling(String),
    #[error("evaluation pole at {0:?}")]
    Pole(Vec<f64>),
    #[error("relaxation too large: {count} standard monomials exceed cap {cap}")]
    RelaxationTooLarge { count: usize, cap: usize },
    #[error("tower is not archimedean: {0}")]
    NotArchimedean(String),
    #[error("positive semidefiniteness lost: {0}")]
    PsdLost(String),
    #[error("certificate does not match tower: {0}")]
    DimensionMismatch(String),
    #[error("solver: {0}")]
    Solver(String),
}
