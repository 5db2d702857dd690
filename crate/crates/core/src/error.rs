use thiserror::Error;

use crate::poly::VarRef;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("variable index {index} outside [1, {n}]")]
    VariableOutOfRange { index: i64, n: u32 },

    #[error("term {term} has degree {degree}, maximum supported is {max}")]
    DegreeTooHigh {
        term: String,
        degree: usize,
        max: usize,
    },

    #[error("assignment does not cover variable {0}")]
    MissingVariable(VarRef),

    #[error("{count} variables exceed the enumeration cap of {cap}")]
    TooManyVariables { count: usize, cap: usize },

    #[error("polynomial has no nonzero coefficients")]
    EmptyPolynomial,

    #[error("integer overflow while combining coefficients")]
    Overflow,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid reduction plan: {0}")]
    InvalidPlan(String),

    #[error("ancilla set cannot reduce term {0}")]
    InsufficientAncillas(String),

    #[error("assignment violates hard clause #{0}")]
    HardClauseViolated(usize),

    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("infeasible cover: universe element {0} is not covered")]
    InfeasibleCover(usize),
}
