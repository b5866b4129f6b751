use thiserror::Error;

/// Errors surfaced by operations in this crate.
///
/// Validation of *values* (out-of-range coordinates, excess probability mass)
/// is deliberately not an `Error`: diagnostics of that kind are the output of
/// [`crate::model::Menu::validate`] and
/// [`crate::model::DiscreteDistribution::validate`]. Operations fail only on
/// structural problems that make the requested computation meaningless.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("menu index {index} out of range (menu has {len} entries plus the null entry 0)")]
    InvalidEntryIndex { index: usize, len: usize },

    #[error("k must be at least 1")]
    ZeroK,

    #[error("sequence index {index} out of range 1..={len}")]
    SequenceIndexOutOfRange { index: usize, len: usize },

    #[error("state space too large: n = {n} exceeds the adaptive-strategy cap {cap}")]
    StateSpaceTooLarge { n: usize, cap: usize },

    #[error("linear program too large: {vars} variables exceed the guard {guard}")]
    LpTooLarge { vars: usize, guard: usize },

    #[error("linear program is unbounded")]
    LpUnbounded,

    #[error("linear program is infeasible")]
    LpInfeasible,

    #[error("{q} is not prime")]
    NotPrime { q: usize },

    #[error("brute-force budget exceeded: {needed} tuples > budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("ground set size {n} exceeds the exhaustive-search cap {cap}; use the algebraic construction instead")]
    GroundSetTooLarge { n: usize, cap: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("constructed instance failed verification: {0}")]
    ConstructionFailed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
