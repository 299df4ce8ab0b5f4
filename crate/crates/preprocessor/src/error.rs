use proof_log::LogError;
use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum PreError {
    #[error(transparent)]
    Log(#[from] LogError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("weight {0} does not fit in 64 bits")]
    WeightOverflow(String),
    #[error("debug replay rejected `{step}`: {reason}")]
    Replay { step: String, reason: String },
    #[error("working state diverged from the proof after {technique}: {detail}")]
    Correspondence { technique: String, detail: String },
    #[error("internal error: {0}")]
    Internal(String),
}

/// Early exits inside the pipeline.
#[derive(Debug)]
pub(crate) enum Flow {
    /// The hard clauses are unsatisfiable; `0 >= 1` is RUP at this point.
    Infeasible,
    Fail(PreError),
}

impl From<PreError> for Flow {
    fn from(e: PreError) -> Flow {
        Flow::Fail(e)
    }
}

impl From<LogError> for Flow {
    fn from(e: LogError) -> Flow {
        Flow::Fail(PreError::Log(e))
    }
}

pub(crate) type Step<T> = Result<T, Flow>;
