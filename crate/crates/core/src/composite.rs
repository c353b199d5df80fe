//! Comprehension levels and study priority, built on top of the isolated metrics.

use crate::domain::{AnswerWeight, DifficultyIndex, QuestionSpec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::session::QuestionResponse;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComprehensionInputs<T> {
    pub qdi: DifficultyIndex,
    pub cdi: DifficultyIndex,
    pub w: AnswerWeight,
    pub srt_s: T,
    /// Maximum expected time `t` for the question.
    pub expected_time_s: T,
}

impl<T: Scalar> ComprehensionInputs<T> {
    /// Inputs for one question; unanswered questions enter with `w = 0`.
    pub fn for_response(question: &QuestionSpec, response: &QuestionResponse) -> Self {
        ComprehensionInputs {
            qdi: question.qdi,
            cdi: question.cdi,
            w: response.weight(),
            srt_s: response.srt_s(),
            expected_time_s: T::from_decimal(question.expected_time_s),
        }
    }
}

fn difficulty_product<T: Scalar>(qdi: DifficultyIndex, cdi: DifficultyIndex) -> T {
    T::from_count(usize::from(qdi.value()) * usize::from(cdi.value()))
}

/// `qdi * cdi * 4`.
pub fn max_comprehension_level<T: Scalar>(qdi: DifficultyIndex, cdi: DifficultyIndex) -> T {
    difficulty_product::<T>(qdi, cdi) * T::four()
}

/// `qdi * cdi * w`.
pub fn effective_comprehension_level<T: Scalar>(
    qdi: DifficultyIndex,
    cdi: DifficultyIndex,
    w: AnswerWeight,
) -> T {
    difficulty_product::<T>(qdi, cdi) * T::from_count(usize::from(w.value()))
}

/// Time-sensitive comprehension of one question.
///
/// Answers within a quarter of the expected time are cut to a quarter of
/// their credit; answers past the expected time lose credit in proportion to
/// the relative overtime.
pub fn question_comprehension_level<T: Scalar>(inp: &ComprehensionInputs<T>) -> T {
    let ecl: T = effective_comprehension_level(inp.qdi, inp.cdi, inp.w);
    let mcl: T = max_comprehension_level(inp.qdi, inp.cdi);
    let t = inp.expected_time_s;
    let srt = inp.srt_s;
    if srt <= t / T::four() {
        ecl / (mcl * T::four())
    } else if srt <= t {
        ecl / mcl
    } else {
        ecl / (mcl + (srt - t) / t)
    }
}

/// `sum(qcl) / (q_count + (1 - ad))`.
pub fn questionnaire_comprehension_level<T: Scalar>(qcls: &[T], ad: T, q_count: usize) -> Result<T> {
    if q_count == 0 {
        return Err(Error::domain("comprehension level over zero questions"));
    }
    if qcls.len() != q_count {
        return Err(Error::domain(format!(
            "expected {q_count} question comprehension levels, got {}",
            qcls.len()
        )));
    }
    let sum = qcls.iter().fold(T::zero(), |acc, &x| acc + x);
    Ok(sum / (T::from_count(q_count) + (T::one() - ad)))
}

/// `(10 - ts) * ws / 10`.
pub fn priority<T: Scalar>(ts: T, ws: T) -> T {
    (T::ten() - ts) * ws / T::ten()
}
