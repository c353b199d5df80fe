//! Class-level analyses: frequency grouping, approval split, AD x QuCL
//! quadrants, priority rankings, response time against expected time and
//! disorder summaries.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Float;
use serde::Serialize;

use crate::composite::priority;
use crate::domain::{QuestionId, QuestionnaireSpec};
use crate::error::{Error, Result};
use crate::isolated::{level_of_disorder, QuestionSubset};
use crate::scalar::Scalar;
use crate::session::{AnswerSequence, Responses};

/// Approval threshold used for splits and quadrants unless overridden.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// `k` equal-width groups over `[0, 1]`. Floors are closed and ceilings open,
/// except the last group which also contains 1.0.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupingScheme<T> {
    pub k: usize,
    pub h: T,
    pub bounds: Vec<(T, T)>,
}

/// Round-half-up integer square root: largest `k` with `(2k - 1)^2 <= 4n`.
fn rounded_sqrt(n: usize) -> usize {
    let mut k = (n as f64).sqrt().round() as usize;
    let fits = |k: usize| k == 0 || (2 * k - 1).pow(2) <= 4 * n;
    while !fits(k) {
        k -= 1;
    }
    while fits(k + 1) {
        k += 1;
    }
    k
}

pub fn build_grouping<T: Scalar>(student_count: usize) -> GroupingScheme<T> {
    let k = rounded_sqrt(student_count).max(1);
    let kt = T::from_count(k);
    let bounds = (0..k)
        .map(|i| (T::from_count(i) / kt, T::from_count(i + 1) / kt))
        .collect();
    GroupingScheme {
        k,
        h: T::one() / kt,
        bounds,
    }
}

/// 1-based group containing `value`.
pub fn assign_group<T: Scalar>(value: T, scheme: &GroupingScheme<T>) -> Result<usize> {
    if !(value >= T::zero() && value <= T::one()) {
        return Err(Error::domain(format!("group value {value:?} outside [0, 1]")));
    }
    Ok(scheme
        .bounds
        .iter()
        .position(|&(_, ceiling)| value < ceiling)
        .map_or(scheme.k, |i| i + 1))
}

/// Per-group counts of a set of values.
pub fn group_histogram<T: Scalar>(values: &[T], scheme: &GroupingScheme<T>) -> Result<Vec<usize>> {
    let mut counts = vec![0; scheme.k];
    for &v in values {
        counts[assign_group(v, scheme)? - 1] += 1;
    }
    Ok(counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ApprovalSplit {
    pub at_or_above: usize,
    pub below: usize,
}

pub fn approval_split<T: Scalar>(values: &[T], threshold: T) -> ApprovalSplit {
    let at_or_above = values.iter().filter(|&&v| v >= threshold).count();
    ApprovalSplit {
        at_or_above,
        below: values.len() - at_or_above,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Quadrant {
    Q1,
    Q2,
    Q3,
    Q4,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::Q1, Quadrant::Q2, Quadrant::Q3, Quadrant::Q4];

    pub fn as_str(self) -> &'static str {
        match self {
            Quadrant::Q1 => "Q1",
            Quadrant::Q2 => "Q2",
            Quadrant::Q3 => "Q3",
            Quadrant::Q4 => "Q4",
        }
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Q1: both at or above the threshold. Q2: low AD, high QuCL. Q3: both low.
/// Q4: high AD, low QuCL.
pub fn classify_quadrant<T: Scalar>(ad: T, qucl: T, threshold: T) -> Quadrant {
    match (ad >= threshold, qucl >= threshold) {
        (true, true) => Quadrant::Q1,
        (false, true) => Quadrant::Q2,
        (false, false) => Quadrant::Q3,
        (true, false) => Quadrant::Q4,
    }
}

/// Student ids per quadrant, every quadrant present.
pub fn quadrant_roster<T: Scalar>(
    points: &[(String, T, T)],
    threshold: T,
) -> BTreeMap<Quadrant, Vec<String>> {
    let mut roster: BTreeMap<Quadrant, Vec<String>> =
        Quadrant::ALL.iter().map(|&q| (q, Vec::new())).collect();
    for (id, ad, qucl) in points {
        roster
            .get_mut(&classify_quadrant(*ad, *qucl, threshold))
            .expect("all quadrants present")
            .push(id.clone());
    }
    roster
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementId {
    Subject(String),
    Topic(u32),
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementId::Subject(s) => f.write_str(s),
            ElementId::Topic(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorityScope {
    Student,
    Class,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriorityRanking<T> {
    pub scope: PriorityScope,
    pub element: ElementId,
    pub normalized_priority: T,
    pub rank: usize,
}

/// Ranks elements by normalized priority `P / 10`, descending, ties by
/// ascending element id.
///
/// Each element carries one `(ts, ws)` pair per student; the priority of an
/// element is the mean of the per-student priorities. Elements without any
/// pair are dropped with a warning.
pub fn rank_priorities<T: Scalar>(
    per_element_ts_ws: impl IntoIterator<Item = (ElementId, Vec<(T, T)>)>,
    scope: PriorityScope,
) -> Vec<PriorityRanking<T>> {
    let mut merged: BTreeMap<ElementId, Vec<(T, T)>> = BTreeMap::new();
    for (element, pairs) in per_element_ts_ws {
        merged.entry(element).or_default().extend(pairs);
    }

    let mut scored: Vec<(ElementId, T)> = merged
        .into_iter()
        .filter_map(|(element, pairs)| {
            if pairs.is_empty() {
                log::warn!("element {element} has no scored questions; excluded from priority ranking");
                return None;
            }
            let total = pairs
                .iter()
                .fold(T::zero(), |acc, &(ts, ws)| acc + priority(ts, ws));
            let mean = total / T::from_count(pairs.len());
            Some((element, mean / T::ten()))
        })
        .collect();

    scored.sort_by(|(ea, pa), (eb, pb)| {
        pb.partial_cmp(pa).unwrap_or(Ordering::Equal).then_with(|| ea.cmp(eb))
    });

    scored
        .into_iter()
        .enumerate()
        .map(|(i, (element, normalized_priority))| PriorityRanking {
            scope,
            element,
            normalized_priority,
            rank: i + 1,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SrtComparison<T> {
    pub question_id: QuestionId,
    pub mean_srt_s: T,
    pub expected_time_s: T,
    /// Mean time at or under the expected time.
    pub within_expected: bool,
}

/// Class mean response time per question against its expected time.
pub fn srt_vs_expected<T: Scalar>(
    class: &[Responses],
    spec: &QuestionnaireSpec,
    subset: &QuestionSubset,
) -> Result<Vec<SrtComparison<T>>> {
    if class.is_empty() {
        return Err(Error::domain("response time comparison over an empty class"));
    }
    if subset.is_empty() {
        return Err(Error::domain("response time comparison over an empty question subset"));
    }
    subset
        .ids()
        .iter()
        .map(|&id| {
            let question = spec
                .question(id)
                .ok_or_else(|| Error::domain(format!("question {id} is not in the questionnaire")))?;
            let total_ms: u64 = class.iter().filter_map(|r| r.get(&id)).map(|r| r.srt_ms).sum();
            let mean_srt_s = T::from_millis(total_ms) / T::from_count(class.len());
            let expected_time_s = T::from_decimal(question.expected_time_s);
            Ok(SrtComparison {
                question_id: id,
                mean_srt_s,
                expected_time_s,
                within_expected: mean_srt_s <= expected_time_s,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisorderSummary<T> {
    /// Mean disorder over every student in the class.
    pub mean: T,
    /// Fraction of students with non-zero disorder.
    pub disordered_fraction: T,
}

/// Disorder statistics of a class, optionally restricted to a set of
/// questions (each student's answer subsequence on those questions).
pub fn disorder_summary<T: Float>(
    sequences: &[AnswerSequence],
    filter: Option<&BTreeSet<QuestionId>>,
) -> Result<DisorderSummary<T>> {
    if sequences.is_empty() {
        return Err(Error::domain("disorder summary over an empty class"));
    }
    let values: Vec<T> = sequences
        .iter()
        .map(|s| match filter {
            Some(ids) => level_of_disorder(&s.restricted_to(ids)),
            None => level_of_disorder(s),
        })
        .collect();
    let n = T::from(values.len()).expect("class size fits float");
    let sum = values.iter().fold(T::zero(), |acc, &d| acc + d);
    let disordered = values.iter().filter(|&&d| d > T::zero()).count();
    Ok(DisorderSummary {
        mean: sum / n,
        disordered_fraction: T::from(disordered).expect("count fits float") / n,
    })
}
