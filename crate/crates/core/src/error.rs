use thiserror::Error;

/// Errors produced by the valuation engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An enumeration would touch more subsets than the configured budget.
    #[error(
        "work budget exceeded: an estimated {estimated:.3e} subsets exceeds the budget of {budget}; \
         raise the budget or pass the override"
    )]
    BudgetExceeded { estimated: f64, budget: u64 },

    #[error("{players} players exceeds the brute-force cap of {cap}")]
    TooManyPlayers { players: usize, cap: usize },

    #[error("bisection bracket [1, {upper}] does not contain a root")]
    BracketExhausted { upper: u64 },

    #[error("malformed index file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
