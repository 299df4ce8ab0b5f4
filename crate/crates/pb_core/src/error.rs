use thiserror::Error;

use crate::Var;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PbError {
    #[error("multiplier must be positive, got {0}")]
    NonPositiveMultiplier(String),
    #[error("divisor must be positive, got {0}")]
    NonPositiveDivisor(String),
    #[error("variable {0} is not assigned")]
    Unassigned(Var),
    #[error("variable {0} cannot be substituted by a literal of itself")]
    SelfSubstitution(Var),
    #[error("parse error: {0}")]
    Parse(String),
}
