//! Per-question facts derived from a student's raw event stream.

use std::collections::{BTreeMap, BTreeSet};

use crate::domain::{
    AnswerOption, AnswerWeight, EventKind, OptionId, QuestionId, QuestionnaireSpec, StudentSession,
};
use crate::scalar::Scalar;

/// How elapsed time is attributed to questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrtMode {
    /// Each inter-event interval goes to the question of the event that opens
    /// it; the trailing interval up to the session end goes to the last
    /// event's question.
    ViewIntervals,
    /// For answer-only logs: each interval between consecutive answers goes to
    /// the later answer's question. The first answer is charged from the
    /// session's first timestamp. Time after the last answer is unattributed.
    AnswerIntervals,
}

impl SrtMode {
    /// `ViewIntervals` if any session has a view event, else `AnswerIntervals`.
    pub fn detect(sessions: &[StudentSession]) -> SrtMode {
        let has_views = sessions
            .iter()
            .flat_map(|s| &s.events)
            .any(|e| e.kind == EventKind::View);
        if has_views {
            SrtMode::ViewIntervals
        } else {
            SrtMode::AnswerIntervals
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SrtMode::ViewIntervals => "view",
            SrtMode::AnswerIntervals => "answer",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuestionResponse {
    pub question_id: QuestionId,
    /// Number of answer events for the question.
    pub markings: u32,
    /// Option of the last answer event, if any.
    pub final_option: Option<AnswerOption>,
    /// Accumulated response time in milliseconds.
    pub srt_ms: u64,
}

impl QuestionResponse {
    pub fn untouched(question_id: QuestionId) -> Self {
        QuestionResponse {
            question_id,
            markings: 0,
            final_option: None,
            srt_ms: 0,
        }
    }

    pub fn srt_s<T: Scalar>(&self) -> T {
        T::from_millis(self.srt_ms)
    }

    /// Weight of the final answer; unanswered questions weigh 0.
    pub fn weight(&self) -> AnswerWeight {
        self.final_option.map_or(AnswerWeight::NONE, |o| o.ws_weight)
    }

    pub fn is_correct(&self) -> bool {
        self.weight().is_correct()
    }

    pub fn is_answered(&self) -> bool {
        self.final_option.is_some()
    }
}

pub type Responses = BTreeMap<QuestionId, QuestionResponse>;

/// Answer events in time order as `(question, option)` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnswerSequence {
    pub entries: Vec<(QuestionId, OptionId)>,
}

impl AnswerSequence {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Subsequence of answers to the given questions, order preserved.
    pub fn restricted_to(&self, questions: &BTreeSet<QuestionId>) -> AnswerSequence {
        AnswerSequence {
            entries: self
                .entries
                .iter()
                .filter(|(q, _)| questions.contains(q))
                .copied()
                .collect(),
        }
    }

    pub fn question_ids(&self) -> impl Iterator<Item = QuestionId> + '_ {
        self.entries.iter().map(|(q, _)| *q)
    }
}

pub fn derive_responses(
    session: &StudentSession,
    spec: &QuestionnaireSpec,
    srt_mode: SrtMode,
) -> Responses {
    let mut responses: Responses = spec
        .question_ids()
        .map(|id| (id, QuestionResponse::untouched(id)))
        .collect();

    for e in session.events.iter().filter(|e| e.kind == EventKind::Answer) {
        let option = e
            .option_id
            .and_then(|oid| spec.question(e.question_id)?.option(oid).copied());
        if let Some(r) = responses.get_mut(&e.question_id) {
            r.markings += 1;
            r.final_option = option;
        }
    }

    let mut charge = |q: QuestionId, ms: u64| {
        if let Some(r) = responses.get_mut(&q) {
            r.srt_ms += ms;
        }
    };

    match srt_mode {
        SrtMode::ViewIntervals => {
            for pair in session.events.windows(2) {
                charge(pair[0].question_id, pair[1].timestamp_ms - pair[0].timestamp_ms);
            }
            if let Some(last) = session.events.last() {
                charge(
                    last.question_id,
                    session.session_end_ms.saturating_sub(last.timestamp_ms),
                );
            }
        }
        SrtMode::AnswerIntervals => {
            if let Some(mut prev) = session.first_timestamp_ms() {
                for e in session.events.iter().filter(|e| e.kind == EventKind::Answer) {
                    charge(e.question_id, e.timestamp_ms - prev);
                    prev = e.timestamp_ms;
                }
            }
        }
    }

    responses
}

pub fn derive_answer_sequence(session: &StudentSession) -> AnswerSequence {
    AnswerSequence {
        entries: session
            .events
            .iter()
            .filter(|e| e.kind == EventKind::Answer)
            .filter_map(|e| Some((e.question_id, e.option_id?)))
            .collect(),
    }
}
