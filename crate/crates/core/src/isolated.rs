//! Metrics computed from one student's responses on a set of questions:
//! traditional score, error rate, weighted score, question doubt, assurance
//! degree, response time and level of disorder.

use std::collections::BTreeSet;

use num_traits::Float;

use crate::domain::{QuestionId, QuestionnaireSpec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::session::{AnswerSequence, QuestionResponse, Responses};

/// A set of questions a metric is evaluated over: the whole questionnaire,
/// one subject or one topic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionSubset {
    question_ids: Vec<QuestionId>,
}

impl QuestionSubset {
    /// Keeps first occurrences, in order. Existence is checked when a metric
    /// is evaluated.
    pub fn new(ids: impl IntoIterator<Item = QuestionId>) -> Self {
        let mut seen = BTreeSet::new();
        QuestionSubset {
            question_ids: ids.into_iter().filter(|id| seen.insert(*id)).collect(),
        }
    }

    pub fn all(spec: &QuestionnaireSpec) -> Self {
        Self::new(spec.question_ids())
    }

    pub fn subject(spec: &QuestionnaireSpec, subject: &str) -> Self {
        Self::new(
            spec.questions
                .iter()
                .filter(|q| q.subject == subject)
                .map(|q| q.question_id),
        )
    }

    pub fn topic(spec: &QuestionnaireSpec, topic: u32) -> Self {
        Self::new(
            spec.questions
                .iter()
                .filter(|q| q.topic_ids.contains(&topic))
                .map(|q| q.question_id),
        )
    }

    pub fn ids(&self) -> &[QuestionId] {
        &self.question_ids
    }

    pub fn len(&self) -> usize {
        self.question_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.question_ids.is_empty()
    }

    pub fn to_set(&self) -> BTreeSet<QuestionId> {
        self.question_ids.iter().copied().collect()
    }
}

/// Responses of the subset's questions; never-seen questions count as untouched.
pub(crate) fn subset_responses(
    responses: &Responses,
    spec: &QuestionnaireSpec,
    subset: &QuestionSubset,
) -> Result<Vec<QuestionResponse>> {
    if subset.is_empty() {
        return Err(Error::domain("metric evaluated over an empty question subset"));
    }
    subset
        .ids()
        .iter()
        .map(|&id| {
            spec.question(id)
                .ok_or_else(|| Error::domain(format!("question {id} is not in the questionnaire")))?;
            Ok(responses
                .get(&id)
                .copied()
                .unwrap_or_else(|| QuestionResponse::untouched(id)))
        })
        .collect()
}

/// `10 * c / n`, with `c` the correct final answers and `n` the subset size.
pub fn traditional_score<T: Scalar>(
    responses: &Responses,
    spec: &QuestionnaireSpec,
    subset: &QuestionSubset,
) -> Result<T> {
    let rs = subset_responses(responses, spec, subset)?;
    let correct = rs.iter().filter(|r| r.is_correct()).count();
    Ok(T::ten() * T::from_count(correct) / T::from_count(rs.len()))
}

/// Error rate on the unit scale: `1 - ts / 10`.
pub fn error_rate<T: Scalar>(ts: T) -> T {
    T::one() - ts / T::ten()
}

/// `10 * sum(w) / mwp` with `mwp = 4 * |subset|`.
pub fn weighted_score<T: Scalar>(
    responses: &Responses,
    spec: &QuestionnaireSpec,
    subset: &QuestionSubset,
) -> Result<T> {
    let rs = subset_responses(responses, spec, subset)?;
    let total: usize = rs.iter().map(|r| usize::from(r.weight().value())).sum();
    let mwp = rs.len() * 4;
    Ok(T::ten() * T::from_count(total) / T::from_count(mwp))
}

/// `markings - 1`; -1 marks an unanswered question.
pub fn question_doubt(response: &QuestionResponse) -> i64 {
    i64::from(response.markings) - 1
}

/// Correct final answers over total markings. A subset with no markings has
/// assurance 0.
pub fn assurance_degree<T: Scalar>(
    responses: &Responses,
    spec: &QuestionnaireSpec,
    subset: &QuestionSubset,
) -> Result<T> {
    let rs = subset_responses(responses, spec, subset)?;
    let markings: usize = rs.iter().map(|r| r.markings as usize).sum();
    if markings == 0 {
        return Ok(T::zero());
    }
    let correct = rs.iter().filter(|r| r.is_correct()).count();
    Ok(T::from_count(correct) / T::from_count(markings))
}

/// Accumulated response time of the subset, in seconds.
pub fn student_response_time<T: Scalar>(responses: &Responses, subset: &QuestionSubset) -> Result<T> {
    if subset.is_empty() {
        return Err(Error::domain("response time over an empty question subset"));
    }
    let ms: u64 = subset
        .ids()
        .iter()
        .filter_map(|id| responses.get(id))
        .map(|r| r.srt_ms)
        .sum();
    Ok(T::from_millis(ms))
}

/// Counts of in-order (`s_i <= s_{i+1}`) and out-of-order consecutive pairs.
pub fn order_counts(sequence: &AnswerSequence) -> (usize, usize) {
    let ids: Vec<QuestionId> = sequence.question_ids().collect();
    ids.windows(2).fold((0, 0), |(in_order, out_of_order), w| {
        if w[0] <= w[1] {
            (in_order + 1, out_of_order)
        } else {
            (in_order, out_of_order + 1)
        }
    })
}

/// Binary entropy (base 2) of the in-order / out-of-order split of the
/// answer sequence. Sequences with fewer than two answers have no disorder.
pub fn level_of_disorder<T: Float>(sequence: &AnswerSequence) -> T {
    let (in_order, out_of_order) = order_counts(sequence);
    let total = in_order + out_of_order;
    if total == 0 {
        return T::zero();
    }
    let total = T::from(total).expect("pair count fits float");
    [in_order, out_of_order]
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = T::from(c).expect("pair count fits float") / total;
            -p * p.log2()
        })
        .fold(T::zero(), |acc, h| acc + h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::OptionId;
    use crate::testutil::{responses, spec_with_weights};
    use crate::Exact;

    fn all_answered(weights: &[u8]) -> Responses {
        let ws: Vec<Option<u8>> = weights.iter().map(|&w| Some(w)).collect();
        responses(&ws, &vec![1; weights.len()])
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn traditional_score_worked_examples() {
        let spec = spec_with_weights(6);
        let all = QuestionSubset::all(&spec);
        let a = all_answered(&[4, 3, 4, 2, 4, 4]);
        let b = all_answered(&[3, 3, 3, 3, 3, 4]);
        assert!(close(traditional_score::<f64>(&a, &spec, &all).unwrap(), 6.67, 5e-3));
        assert!(close(traditional_score::<f64>(&b, &spec, &all).unwrap(), 1.67, 5e-3));
        assert_eq!(traditional_score::<Exact>(&a, &spec, &all).unwrap(), Exact::new(20, 3));
        let perfect = all_answered(&[4; 6]);
        assert_eq!(traditional_score::<f64>(&perfect, &spec, &all).unwrap(), 10.0);
    }

    #[test]
    fn unanswered_counts_as_incorrect() {
        let spec = spec_with_weights(2);
        let r = responses(&[Some(4), None], &[1, 0]);
        let ts: Exact = traditional_score(&r, &spec, &QuestionSubset::all(&spec)).unwrap();
        assert_eq!(ts, Exact::from_integer(5));
    }

    #[test]
    fn empty_subset_is_domain_error() {
        let spec = spec_with_weights(2);
        let r = all_answered(&[4, 4]);
        let empty = QuestionSubset::new([]);
        assert!(matches!(traditional_score::<f64>(&r, &spec, &empty), Err(Error::Domain(_))));
        assert!(matches!(weighted_score::<f64>(&r, &spec, &empty), Err(Error::Domain(_))));
        assert!(matches!(assurance_degree::<f64>(&r, &spec, &empty), Err(Error::Domain(_))));
        assert!(matches!(student_response_time::<f64>(&r, &empty), Err(Error::Domain(_))));
        let unknown = QuestionSubset::new([QuestionId(9)]);
        assert!(traditional_score::<f64>(&r, &spec, &unknown).is_err());
    }

    #[test]
    fn error_rate_normalizes() {
        assert_eq!(error_rate(10.0), 0.0);
        assert_eq!(error_rate(0.0), 1.0);
        assert!(close(error_rate(6.67), 0.333, 1e-3));
    }

    #[test]
    fn weighted_score_worked_examples() {
        let spec = spec_with_weights(6);
        let all = QuestionSubset::all(&spec);
        let a = all_answered(&[4, 3, 4, 2, 4, 4]);
        let b = all_answered(&[3, 3, 3, 3, 3, 4]);
        assert_eq!(weighted_score::<f64>(&a, &spec, &all).unwrap(), 8.75);
        assert_eq!(weighted_score::<Exact>(&a, &spec, &all).unwrap(), Exact::new(35, 4));
        assert!(close(weighted_score::<f64>(&b, &spec, &all).unwrap(), 7.92, 5e-3));
        let zero = all_answered(&[0; 6]);
        assert_eq!(weighted_score::<f64>(&zero, &spec, &all).unwrap(), 0.0);
    }

    #[test]
    fn question_doubt_examples() {
        let r = |m| QuestionResponse {
            markings: m,
            ..QuestionResponse::untouched(QuestionId(1))
        };
        assert_eq!(question_doubt(&r(2)), 1);
        assert_eq!(question_doubt(&r(8)), 7);
        assert_eq!(question_doubt(&r(0)), -1);
    }

    #[test]
    fn question_doubt_table() {
        let markings = [
            [0, 1, 0, 1, 1, 1],
            [1, 1, 1, 1, 1, 1],
            [2, 4, 5, 6, 8, 1],
        ];
        let doubts = [
            [-1, 0, -1, 0, 0, 0],
            [0, 0, 0, 0, 0, 0],
            [1, 3, 4, 5, 7, 0],
        ];
        for (ms, ds) in markings.iter().zip(&doubts) {
            for (&m, &d) in ms.iter().zip(ds) {
                let r = QuestionResponse {
                    markings: m,
                    ..QuestionResponse::untouched(QuestionId(1))
                };
                assert_eq!(question_doubt(&r), d);
            }
        }
    }

    #[test]
    fn assurance_degree_extreme_cases() {
        let spec = spec_with_weights(6);
        let all = QuestionSubset::all(&spec);
        let max = responses(&[Some(4); 6], &[1; 6]);
        let min = responses(&[Some(0); 6], &[1; 6]);
        let self_correcting = responses(&[Some(4); 6], &[4, 2, 1, 3, 5, 2]);
        assert_eq!(assurance_degree::<f64>(&max, &spec, &all).unwrap(), 1.0);
        assert_eq!(assurance_degree::<f64>(&min, &spec, &all).unwrap(), 0.0);
        assert_eq!(
            assurance_degree::<Exact>(&self_correcting, &spec, &all).unwrap(),
            Exact::new(6, 17)
        );
        assert!(close(assurance_degree::<f64>(&self_correcting, &spec, &all).unwrap(), 0.3529, 1e-4));
        let blank = responses(&[None; 6], &[0; 6]);
        assert_eq!(assurance_degree::<f64>(&blank, &spec, &all).unwrap(), 0.0);
    }

    #[test]
    fn response_time_is_additive() {
        let spec = spec_with_weights(2);
        let mut r = all_answered(&[4, 4]);
        r.get_mut(&QuestionId(1)).unwrap().srt_ms = 70_000;
        r.get_mut(&QuestionId(2)).unwrap().srt_ms = 60_000;
        let all = QuestionSubset::all(&spec);
        assert_eq!(student_response_time::<f64>(&r, &all).unwrap(), 130.0);
        let zero = all_answered(&[4, 4]);
        assert_eq!(student_response_time::<f64>(&zero, &all).unwrap(), 0.0);
    }

    #[test]
    fn response_time_portuguese_total() {
        let spec = spec_with_weights(8);
        let srts = [286_600, 169_600, 177_600, 137_000, 169_000, 138_000, 166_000, 218_200];
        let mut r = all_answered(&[4; 8]);
        for (i, ms) in srts.into_iter().enumerate() {
            r.get_mut(&QuestionId(i as u32 + 1)).unwrap().srt_ms = ms;
        }
        let total: Exact = student_response_time(&r, &QuestionSubset::all(&spec)).unwrap();
        assert_eq!(total, Exact::from_integer(24 * 60 + 22));
    }

    fn seq(ids: &[u32]) -> AnswerSequence {
        AnswerSequence {
            entries: ids
                .iter()
                .map(|&n| (QuestionId(n), OptionId::new('a').unwrap()))
                .collect(),
        }
    }

    #[test]
    fn disorder_of_worked_sequence() {
        let s = seq(&[1, 2, 3, 5, 1, 4, 1]);
        assert_eq!(order_counts(&s), (4, 2));
        // Oracle: natural-log entropy divided by ln 2.
        let (p1, p2) = (4.0f64 / 6.0, 2.0f64 / 6.0);
        let oracle = -(p1 * p1.ln() + p2 * p2.ln()) / std::f64::consts::LN_2;
        let d: f64 = level_of_disorder(&s);
        assert!(close(d, oracle, 1e-12));
        assert!(close(d, 0.9183, 1e-4));
    }

    #[test]
    fn disorder_edge_cases() {
        assert_eq!(level_of_disorder::<f64>(&seq(&[1, 2, 3, 4])), 0.0);
        assert_eq!(level_of_disorder::<f64>(&seq(&[4, 3, 2, 1])), 0.0);
        assert_eq!(level_of_disorder::<f64>(&seq(&[])), 0.0);
        assert_eq!(level_of_disorder::<f64>(&seq(&[3])), 0.0);
        assert_eq!(level_of_disorder::<f64>(&seq(&[1, 2, 1])), 1.0);
        assert_eq!(level_of_disorder::<f32>(&seq(&[1, 2, 1])), 1.0);
        // repeated question counts as in order
        assert_eq!(level_of_disorder::<f64>(&seq(&[2, 2, 2])), 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_responses(n: usize) -> impl Strategy<Value = Responses> {
            proptest::collection::vec((proptest::option::of(0u8..=4), 0u32..6), n).prop_map(|v| {
                let weights: Vec<Option<u8>> = v
                    .iter()
                    .map(|(w, m)| if *m == 0 { None } else { *w })
                    .collect();
                let markings: Vec<u32> = v
                    .iter()
                    .map(|(w, m)| if w.is_none() { 0 } else { *m })
                    .collect();
                responses(&weights, &markings)
            })
        }

        proptest! {
            #[test]
            fn ws_dominates_ts(r in arb_responses(6)) {
                let spec = spec_with_weights(6);
                let all = QuestionSubset::all(&spec);
                let ts: Exact = traditional_score(&r, &spec, &all).unwrap();
                let ws: Exact = weighted_score(&r, &spec, &all).unwrap();
                prop_assert!(ws >= ts);
                let all_wrong_zero = r.values().all(|x| x.is_correct() || x.weight().value() == 0);
                prop_assert_eq!(ws == ts, all_wrong_zero);
            }

            #[test]
            fn assurance_in_unit_interval(r in arb_responses(6)) {
                let spec = spec_with_weights(6);
                let ad: Exact = assurance_degree(&r, &spec, &QuestionSubset::all(&spec)).unwrap();
                prop_assert!(ad >= Exact::from_integer(0) && ad <= Exact::from_integer(1));
            }

            #[test]
            fn doubt_sign_tracks_answered(m in 0u32..20) {
                let r = QuestionResponse {
                    markings: m,
                    final_option: (m > 0).then(|| crate::testutil::option_for_weight(4)),
                    ..QuestionResponse::untouched(QuestionId(1))
                };
                prop_assert_eq!(question_doubt(&r) == -1, !r.is_answered());
            }

            #[test]
            fn disorder_bounded(ids in proptest::collection::vec(1u32..10, 0..40)) {
                let s = seq(&ids);
                let d: f64 = level_of_disorder(&s);
                prop_assert!((0.0..=1.0).contains(&d));
                let (a, b) = order_counts(&s);
                prop_assert_eq!(d == 1.0, a == b && a > 0);
                prop_assert_eq!(d.to_bits(), level_of_disorder::<f64>(&s).to_bits());
            }
        }
    }
}
