use thiserror::Error;

use crate::alphabets::HomRejection;

pub type Result<T, E = GcaError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GcaError {
    #[error("invalid group table: {0}")]
    InvalidGroupTable(String),
    #[error("invalid element for this universe: {0}")]
    InvalidElement(String),
    #[error("operation not supported on this universe: {0}")]
    UnsupportedUniverse(String),
    #[error("universe is infinite")]
    InfiniteUniverse,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("alphabet is not a finite group")]
    NotAGroupAlphabet,
    #[error("homomorphism rule rejected: {0}")]
    HomRejected(HomRejection),
    #[error("malformed rule: {0}")]
    MalformedRule(String),
    #[error("pattern window does not match the memory set")]
    DomainMismatch,
    #[error("enumeration budget exceeded after {partial} accepted items")]
    BudgetExceeded { partial: usize },
    #[error("window too large: {size} entries exceeds cap {cap}")]
    WindowTooLarge { size: u128, cap: u128 },
    #[error("verification cap exceeded: {size} exceeds cap {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error("automata are incompatible: {0}")]
    IncompatibleAutomata(String),
    #[error("lattice is rank deficient")]
    RankDeficientLattice,
    #[error("cellular automaton is neither a group nor a linear automaton")]
    NotAGroupOrLinearCA,
    #[error("cellular automaton is not linear")]
    NotLinear,
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("operands are incompatible: {0}")]
    IncompatibleOperands(String),
    #[error("ragged input: {0}")]
    RaggedInput(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl GcaError {
    /// Stable variant name for machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            GcaError::InvalidGroupTable(_) => "InvalidGroupTable",
            GcaError::InvalidElement(_) => "InvalidElement",
            GcaError::UnsupportedUniverse(_) => "UnsupportedUniverse",
            GcaError::InfiniteUniverse => "InfiniteUniverse",
            GcaError::NotPrime(_) => "NotPrime",
            GcaError::NotAGroupAlphabet => "NotAGroupAlphabet",
            GcaError::HomRejected(_) => "HomRejected",
            GcaError::MalformedRule(_) => "MalformedRule",
            GcaError::DomainMismatch => "DomainMismatch",
            GcaError::BudgetExceeded { .. } => "BudgetExceeded",
            GcaError::WindowTooLarge { .. } => "WindowTooLarge",
            GcaError::CapExceeded { .. } => "CapExceeded",
            GcaError::IncompatibleAutomata(_) => "IncompatibleAutomata",
            GcaError::RankDeficientLattice => "RankDeficientLattice",
            GcaError::NotAGroupOrLinearCA => "NotAGroupOrLinearCA",
            GcaError::NotLinear => "NotLinear",
            GcaError::UnsupportedCombination(_) => "UnsupportedCombination",
            GcaError::PreconditionFailed(_) => "PreconditionFailed",
            GcaError::IncompatibleOperands(_) => "IncompatibleOperands",
            GcaError::RaggedInput(_) => "RaggedInput",
            GcaError::Config(_) => "Config",
        }
    }
}
