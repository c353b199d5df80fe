//! Learning analytics over multiple-choice assessment event logs.
//!
//! The metric functions are generic over [`Scalar`], so the same code runs on
//! `f64` for reporting and on [`Exact`] rationals for checking. Only the level
//! of disorder, which needs a logarithm, is restricted to floating point.

pub mod analytics;
pub mod composite;
pub mod domain;
pub mod error;
pub mod isolated;
pub mod literature;
pub mod report;
pub mod scalar;
pub mod session;
pub mod simulator;

#[cfg(test)]
mod testutil;

pub use domain::{
    parse_event_log, parse_questionnaire, parse_questionnaire_with, write_event_log, AnswerOption,
    AnswerWeight, AssessmentEvent, Deviation, DifficultyIndex, EventKind, OptionId, ParseOptions,
    QuestionId, QuestionSpec, QuestionnaireSpec, StudentSession,
};
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use session::{derive_answer_sequence, derive_responses, AnswerSequence, QuestionResponse, Responses, SrtMode};

/// Exact rational scalar for checking metric identities without rounding.
pub type Exact = num_rational::Ratio<i64>;

pub type Comprehension = composite::ComprehensionInputs<f64>;
pub type Grouping = analytics::GroupingScheme<f64>;
pub type Ranking = analytics::PriorityRanking<f64>;
pub type SrtCheck = analytics::SrtComparison<f64>;
pub type Disorder = analytics::DisorderSummary<f64>;
pub type Series = literature::ScoreSeries<f64>;
pub type Understanding = literature::UnderstandingConfig<f64>;
