//! Fixtures shared by unit tests.

use std::collections::BTreeSet;

use crate::domain::{
    AnswerOption, AnswerWeight, DifficultyIndex, OptionId, QuestionId, QuestionSpec,
    QuestionnaireSpec,
};
use crate::session::{QuestionResponse, Responses};

/// `n` questions with options a..e weighted 4, 3, 2, 1, 0; all indices medium, t = 100 s.
pub fn spec_with_weights(n: u32) -> QuestionnaireSpec {
    QuestionnaireSpec {
        questionnaire_id: "fixture".into(),
        max_total_time_s: 100.0 * f64::from(n.max(1)) * 2.0,
        questions: (1..=n)
            .map(|i| QuestionSpec {
                question_id: QuestionId(i),
                subject: "S".into(),
                topic_ids: BTreeSet::from([1]),
                qdi: DifficultyIndex::MEDIUM,
                cdi: DifficultyIndex::MEDIUM,
                tdi: DifficultyIndex::MEDIUM,
                expected_time_s: 100.0,
                options: (0u8..5)
                    .map(|k| {
                        AnswerOption::new(
                            OptionId::new((b'a' + k) as char).unwrap(),
                            AnswerWeight::new(4 - i64::from(k)).unwrap(),
                        )
                    })
                    .collect(),
            })
            .collect(),
    }
}

pub fn option_for_weight(w: u8) -> AnswerOption {
    AnswerOption::new(
        OptionId::new((b'a' + (4 - w)) as char).unwrap(),
        AnswerWeight::new(i64::from(w)).unwrap(),
    )
}

/// Responses for questions 1..=n with the given final weights (None = unanswered)
/// and markings.
pub fn responses(weights: &[Option<u8>], markings: &[u32]) -> Responses {
    weights
        .iter()
        .zip(markings)
        .enumerate()
        .map(|(i, (w, &m))| {
            let id = QuestionId(i as u32 + 1);
            (
                id,
                QuestionResponse {
                    question_id: id,
                    markings: m,
                    final_option: w.map(option_for_weight),
                    srt_ms: 0,
                },
            )
        })
        .collect()
}
