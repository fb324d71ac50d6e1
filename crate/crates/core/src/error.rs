use thiserror::Error;

/// Errors surfaced by the discrepancy library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("board size must be at least 1")]
    EmptyBoard,
    #[error("cell sign must be +1 or -1, got {0}")]
    InvalidSign(i32),
    #[error("direction must be a unit vector (|u| = {0})")]
    NotUnit(f64),
    #[error("exponent p must be at least 1, got {0}")]
    InvalidExponent(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("board of size {n} is too large for exact search (cap {cap}); use the sampled search")]
    TooLargeForExactSearch { n: usize, cap: usize },
    #[error("board of size {n} exceeds the cost guard of {cap}")]
    CostGuard { n: usize, cap: usize },
    #[error("cell ({m}, {n}) is outside the built extent [-{half}, {half}); extend levels")]
    OutOfExtent { m: i64, n: i64, half: i64 },
    #[error("level {level}: retry budget of {retries} exhausted; best max {best_max:.6} exceeds bound {bound:.6}")]
    RetryBudgetExhausted {
        level: usize,
        retries: usize,
        best_max: f64,
        bound: f64,
    },
    #[error("hierarchy extent {n} exceeds the cap {cap}")]
    HierarchyTooLarge { n: u64, cap: u64 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyBoard => "empty_board",
            Error::InvalidSign(_) => "invalid_sign",
            Error::NotUnit(_) => "not_unit",
            Error::InvalidExponent(_) => "invalid_exponent",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::TooLargeForExactSearch { .. } => "too_large_for_exact_search",
            Error::CostGuard { .. } => "cost_guard",
            Error::OutOfExtent { .. } => "out_of_extent",
            Error::RetryBudgetExhausted { .. } => "retry_budget_exhausted",
            Error::HierarchyTooLarge { .. } => "hierarchy_too_large",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
