use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("input vectors are not orthonormal (Gram deviation {deviation:.3e})")]
    NonOrthonormalInput { deviation: f64 },

    #[error("eigenbases span {found} dimensions, expected {expected}")]
    IncompleteBasis { expected: usize, found: usize },

    #[error("duplicate eigenphase {0}")]
    DuplicatePhase(String),

    #[error("invalid phase: {0}")]
    InvalidPhase(String),

    #[error("sequence of length {len} is too short for N = {n}, M = {m}")]
    InsufficientLength { len: usize, n: usize, m: usize },

    #[error("not a pair-partition: {0}")]
    NotAPairPartition(String),

    #[error("k = {0} is too large to enumerate (limit 5)")]
    KTooLarge(usize),

    #[error("evaluation budget exceeded: {work} > {limit}")]
    BudgetExceeded { work: u128, limit: u128 },

    #[error("vector is not an eigenvector for the given phase (residual {residual:.3e})")]
    NotAnEigenvector { residual: f64 },

    #[error("model cannot be materialized as a dense operator")]
    ModelNotMaterializable,

    #[error("limit map is not a partial isometry (defect {defect:.3e})")]
    NotPartialIsometry { defect: f64 },

    #[error("invalid model parameter: {0}")]
    InvalidModel(String),

    #[error("wrong operator count: expected {expected}, found {found}")]
    OperatorCount { expected: usize, found: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
