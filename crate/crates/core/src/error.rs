use thiserror::Error;

use crate::domain::QuestionId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input syntax.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// Well-formed input that breaks a domain invariant.
    #[error("{}", describe_validation(.field, .question_id, .line, .message))]
    Validation {
        field: String,
        question_id: Option<QuestionId>,
        line: Option<usize>,
        message: String,
    },
    /// A metric was evaluated outside its domain (empty subset, too few scores, ...).
    #[error("domain error: {0}")]
    Domain(String),
    #[error("simulation error: {0}")]
    Simulation(String),
}

impl Error {
    pub(crate) fn validation(
        field: impl Into<String>,
        question_id: Option<QuestionId>,
        message: impl Into<String>,
    ) -> Self {
        Error::Validation {
            field: field.into(),
            question_id,
            line: None,
            message: message.into(),
        }
    }

    pub(crate) fn at_line(mut self, at: usize) -> Self {
        if let Error::Validation { line, .. } = &mut self {
            *line = Some(at);
        }
        self
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }

    /// `(field, question_id)` of a validation error, for matching in callers.
    pub fn validation_target(&self) -> Option<(&str, Option<QuestionId>)> {
        match self {
            Error::Validation {
                field, question_id, ..
            } => Some((field.as_str(), *question_id)),
            _ => None,
        }
    }
}

fn describe_validation(
    field: &str,
    question_id: &Option<QuestionId>,
    line: &Option<usize>,
    message: &str,
) -> String {
    let mut out = format!("validation error: field `{field}`");
    if let Some(q) = question_id {
        out.push_str(&format!(", question {q}"));
    }
    if let Some(l) = line {
        out.push_str(&format!(", line {l}"));
    }
    out.push_str(": ");
    out.push_str(message);
    out
}
