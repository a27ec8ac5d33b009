use thiserror::Error;

/// Errors raised across the lattice, form and group layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("lattice is not integral")]
    NotIntegral,
    #[error("lattice is not even")]
    NotEven,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("sublattice is not contained in the target lattice")]
    NotContained,
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("operation requires rank at least one")]
    RankZero,
    #[error("budget exceeded: {what} (limit {limit})")]
    BudgetExceeded { what: String, limit: u128 },
    #[error("discriminant forms admit no anti-isometry")]
    NoAntiIsometry,
    #[error("invalid glue: {0}")]
    InvalidGlue(String),
    #[error("ambient lattice is not Leech-like: {0}")]
    NotLeechLike(String),
    #[error("permutation domain is not faithful")]
    NotFaithfulDomain,
    #[error("matrix does not preserve the gram matrix")]
    NotGramPreserving,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("sublattice is not an S-lattice")]
    NotSLattice,
    #[error("word is not a codeword")]
    NotCodeword,
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn budget(what: impl Into<String>, limit: u128) -> Self {
        Error::BudgetExceeded { what: what.into(), limit }
    }
}
