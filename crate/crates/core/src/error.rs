use thiserror::Error;

use crate::reduce::GirthReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    /// The exhaustive search space is larger than the configured budget.
    #[error("budget exceeded: {needed} candidates needed, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("promise violation: {0}")]
    PromiseViolation(String),

    #[error("parameters are not on the tractable side: {0}")]
    NotTractable(String),

    #[error("family {index} of the source disjunction recolours into no target family")]
    MissingContainment { index: usize },

    #[error("girth precondition failed: {} tuples form a cycle", .0.witness.as_ref().map_or(0, |w| w.len()))]
    Girth(Box<GirthReport>),

    #[error("integrality: {0}")]
    Integrality(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn structure(msg: impl Into<String>) -> Self {
        Error::InvalidStructure(msg.into())
    }
}
