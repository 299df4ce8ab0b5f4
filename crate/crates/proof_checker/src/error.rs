use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

/// A rule application that failed; the caller attaches the line number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{rule}: {reason}")]
pub struct RuleError {
    pub rule: &'static str,
    pub reason: String,
}

impl RuleError {
    pub(crate) fn new(rule: &'static str, reason: impl Into<String>) -> RuleError {
        RuleError { rule, reason: reason.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: {source}")]
    Rule { line: usize, source: RuleError },
    #[error("line {line}: output: {reason}")]
    Output { line: usize, reason: String },
    #[error("line {line}: {reason}")]
    Structure { line: usize, reason: String },
    #[error("reading proof: {0}")]
    Io(String),
}

impl CheckError {
    /// 1-based proof line the rejection refers to (0 when not line-specific).
    pub fn line(&self) -> usize {
        match self {
            CheckError::Parse(e) => e.line,
            CheckError::Rule { line, .. } | CheckError::Output { line, .. } | CheckError::Structure { line, .. } => {
                *line
            }
            CheckError::Io(_) => 0,
        }
    }

    /// The message without the line prefix.
    pub fn reason(&self) -> String {
        match self {
            CheckError::Parse(e) => e.msg.clone(),
            CheckError::Rule { source, .. } => source.to_string(),
            CheckError::Output { reason, .. } => format!("output: {reason}"),
            CheckError::Structure { reason, .. } => reason.clone(),
            CheckError::Io(e) => e.clone(),
        }
    }
}
