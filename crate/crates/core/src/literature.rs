//! Reference metrics from earlier work: level of understanding, student
//! learning rate and difficulty level.

use crate::domain::{DifficultyIndex, Deviation};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Response-time class of an answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResponseTimeClass {
    BlindGuess,
    Normal,
}

impl ResponseTimeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ResponseTimeClass::BlindGuess => "blind_guess",
            ResponseTimeClass::Normal => "normal",
        }
    }
}

/// Divisors applied per response-time class, and the fraction of the expected
/// time under which an answer counts as a blind guess.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnderstandingConfig<T> {
    pub blind_guess: T,
    pub normal: T,
    pub fast_fraction: T,
}

impl<T: Scalar> Default for UnderstandingConfig<T> {
    fn default() -> Self {
        UnderstandingConfig {
            blind_guess: T::from_count(5),
            normal: T::one(),
            fast_fraction: T::one() / T::four(),
        }
    }
}

impl<T: Scalar> UnderstandingConfig<T> {
    pub fn divisor(&self, class: ResponseTimeClass) -> T {
        match class {
            ResponseTimeClass::BlindGuess => self.blind_guess,
            ResponseTimeClass::Normal => self.normal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LuInputs {
    pub tdi: DifficultyIndex,
    pub cdi: DifficultyIndex,
    pub qdi: DifficultyIndex,
    pub deviation: Deviation,
    pub response_time_class: ResponseTimeClass,
}

/// `tdi * cdi * qdi * deviation / response_time` with the default class values
/// (blind guess 5, normal 1).
pub fn level_of_understanding<T: Scalar>(inp: &LuInputs) -> T {
    level_of_understanding_with(inp, &UnderstandingConfig::default())
}

pub fn level_of_understanding_with<T: Scalar>(inp: &LuInputs, cfg: &UnderstandingConfig<T>) -> T {
    let product = [inp.tdi.value(), inp.cdi.value(), inp.qdi.value(), inp.deviation.value()]
        .into_iter()
        .map(usize::from)
        .product::<usize>();
    T::from_count(product) / cfg.divisor(inp.response_time_class)
}

/// Blind guess iff `srt <= expected / 4`.
pub fn classify_response_time<T: Scalar>(srt_s: T, expected_time_s: T) -> ResponseTimeClass {
    classify_response_time_with(srt_s, expected_time_s, T::one() / T::four())
}

pub fn classify_response_time_with<T: Scalar>(
    srt_s: T,
    expected_time_s: T,
    fast_fraction: T,
) -> ResponseTimeClass {
    if srt_s <= expected_time_s * fast_fraction {
        ResponseTimeClass::BlindGuess
    } else {
        ResponseTimeClass::Normal
    }
}

/// Scores of one student on one element (subject, topic or concept) across
/// successive assessments.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSeries<T> {
    pub student_id: String,
    pub element_id: String,
    pub scores: Vec<T>,
    /// Number of assessments the rate is averaged over.
    pub n_assessments: usize,
}

impl<T> ScoreSeries<T> {
    pub fn new(student_id: impl Into<String>, element_id: impl Into<String>, scores: Vec<T>) -> Self {
        let n_assessments = scores.len();
        ScoreSeries {
            student_id: student_id.into(),
            element_id: element_id.into(),
            scores,
            n_assessments,
        }
    }
}

/// Sum of signed squared score changes over `n_assessments - 1`.
pub fn student_learning_rate<T: Scalar>(series: &ScoreSeries<T>) -> Result<T> {
    if series.scores.len() < 2 || series.n_assessments < 2 {
        return Err(Error::domain(format!(
            "learning rate of {}/{} needs at least two assessments",
            series.student_id, series.element_id
        )));
    }
    let sum = series
        .scores
        .windows(2)
        .map(|w| {
            let delta = w[1] - w[0];
            delta * delta.abs()
        })
        .fold(T::zero(), |acc, x| acc + x);
    Ok(sum / T::from_count(series.n_assessments - 1))
}

/// Mean learning rate across students.
pub fn difficulty_level<T: Scalar>(slrs: &[T]) -> Result<T> {
    if slrs.is_empty() {
        return Err(Error::domain("difficulty level of an empty set of learning rates"));
    }
    let sum = slrs.iter().fold(T::zero(), |acc, &x| acc + x);
    Ok(sum / T::from_count(slrs.len()))
}
