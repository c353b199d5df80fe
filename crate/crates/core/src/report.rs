//! Per-student and class reports, their JSON encoding and plot-data tables.
//!
//! Every decimal is written with exactly four fractional digits. Rounding is
//! half-to-even on the binary value, which is what `{:.4}` does.

use std::collections::BTreeMap;

use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::analytics::{
    approval_split, assign_group, build_grouping, classify_quadrant, disorder_summary, group_histogram,
    quadrant_roster, rank_priorities, srt_vs_expected, ApprovalSplit, ElementId, GroupingScheme,
    PriorityRanking, PriorityScope, Quadrant, DEFAULT_THRESHOLD,
};
use crate::composite::{priority, question_comprehension_level, questionnaire_comprehension_level, ComprehensionInputs};
use crate::domain::{Deviation, QuestionId, QuestionnaireSpec, StudentSession};
use crate::error::{Error, Result};
use crate::isolated::{
    assurance_degree, error_rate, level_of_disorder, question_doubt, student_response_time,
    traditional_score, weighted_score, QuestionSubset,
};
use crate::literature::{
    classify_response_time_with, level_of_understanding_with, LuInputs, ScoreSeries,
    UnderstandingConfig, difficulty_level, student_learning_rate,
};
use crate::session::{derive_answer_sequence, derive_responses, AnswerSequence, Responses, SrtMode};

/// Decimal with four fractional digits; `-0.0000` is written as `0.0000`.
pub fn format_fixed4(v: f64) -> String {
    if !v.is_finite() {
        return "null".to_string();
    }
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

/// Seconds as `MM:SS`, rounded to the nearest second; minutes are not capped.
pub fn format_mmss(seconds: f64) -> String {
    let total = seconds.max(0.0).round() as u64;
    format!("{:02}:{:02}", total / 60, total % 60)
}

fn fixed4<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    RawValue::from_string(format_fixed4(*v))
        .map_err(S::Error::custom)?
        .serialize(s)
}

fn fixed4_pair<S: Serializer>(v: &(f64, f64), s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Pair(#[serde(serialize_with = "fixed4")] f64, #[serde(serialize_with = "fixed4")] f64);
    Pair(v.0, v.1).serialize(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportConfig {
    pub srt_mode: SrtMode,
    pub threshold: f64,
    pub understanding: UnderstandingConfig<f64>,
}

impl ReportConfig {
    pub fn new(srt_mode: SrtMode) -> Self {
        ReportConfig {
            srt_mode,
            threshold: DEFAULT_THRESHOLD,
            understanding: UnderstandingConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionRow {
    pub question_id: QuestionId,
    pub subject: String,
    pub markings: u32,
    pub question_doubt: i64,
    pub final_option: Option<char>,
    pub weight: u8,
    #[serde(serialize_with = "fixed4")]
    pub srt_s: f64,
    #[serde(serialize_with = "fixed4")]
    pub qcl: f64,
    #[serde(serialize_with = "fixed4")]
    pub lu: f64,
    pub response_time_class: &'static str,
}

/// Metrics restricted to one set of questions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetRow {
    /// Questionnaire id, subject name or topic id.
    pub element: String,
    pub question_count: usize,
    #[serde(serialize_with = "fixed4")]
    pub ts: f64,
    #[serde(serialize_with = "fixed4")]
    pub ws: f64,
    #[serde(serialize_with = "fixed4")]
    pub error_rate: f64,
    #[serde(serialize_with = "fixed4")]
    pub ad: f64,
    #[serde(serialize_with = "fixed4")]
    pub srt_s: f64,
    #[serde(serialize_with = "fixed4")]
    pub disorder: f64,
    #[serde(serialize_with = "fixed4")]
    pub qucl: f64,
    #[serde(serialize_with = "fixed4")]
    pub priority: f64,
}

/// 1-based group of each unit-scale metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroupIndices {
    pub ts: usize,
    pub ws: usize,
    pub ad: usize,
    pub qucl: usize,
}

/// Everything computable for one student without looking at the class.
#[derive(Debug, Clone, PartialEq)]
pub struct StudentMetrics {
    pub student_id: String,
    pub responses: Responses,
    pub sequence: AnswerSequence,
    pub questions: Vec<QuestionRow>,
    pub questionnaire: SubsetRow,
    pub subjects: Vec<SubsetRow>,
    pub topics: Vec<SubsetRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudentMetricsReport {
    pub student_id: String,
    pub questions: Vec<QuestionRow>,
    pub questionnaire: SubsetRow,
    pub subjects: Vec<SubsetRow>,
    pub topics: Vec<SubsetRow>,
    pub quadrant: Quadrant,
    pub groups: GroupIndices,
}

fn subset_row(
    element: String,
    spec: &QuestionnaireSpec,
    responses: &Responses,
    sequence: &AnswerSequence,
    qcls: &BTreeMap<QuestionId, f64>,
    subset: &QuestionSubset,
) -> Result<SubsetRow> {
    let ts: f64 = traditional_score(responses, spec, subset)?;
    let ws: f64 = weighted_score(responses, spec, subset)?;
    let ad: f64 = assurance_degree(responses, spec, subset)?;
    let subset_qcls: Vec<f64> = subset.ids().iter().map(|id| qcls[id]).collect();
    Ok(SubsetRow {
        element,
        question_count: subset.len(),
        ts,
        ws,
        error_rate: error_rate(ts),
        ad,
        srt_s: student_response_time(responses, subset)?,
        disorder: level_of_disorder(&sequence.restricted_to(&subset.to_set())),
        qucl: questionnaire_comprehension_level(&subset_qcls, ad, subset.len())?,
        priority: priority(ts, ws),
    })
}

pub fn compute_student(
    spec: &QuestionnaireSpec,
    session: &StudentSession,
    cfg: &ReportConfig,
) -> Result<StudentMetrics> {
    let responses = derive_responses(session, spec, cfg.srt_mode);
    let sequence = derive_answer_sequence(session);

    let mut qcls = BTreeMap::new();
    let mut questions = Vec::with_capacity(spec.len());
    for q in &spec.questions {
        let r = &responses[&q.question_id];
        let qcl = question_comprehension_level(&ComprehensionInputs::<f64>::for_response(q, r));
        qcls.insert(q.question_id, qcl);
        let srt_s: f64 = r.srt_s();
        let class = classify_response_time_with(srt_s, q.expected_time_s, cfg.understanding.fast_fraction);
        let deviation = r
            .final_option
            .map_or(Deviation::new(0).expect("0 is a deviation"), |o| o.lu_deviation);
        let lu = level_of_understanding_with(
            &LuInputs {
                tdi: q.tdi,
                cdi: q.cdi,
                qdi: q.qdi,
                deviation,
                response_time_class: class,
            },
            &cfg.understanding,
        );
        questions.push(QuestionRow {
            question_id: q.question_id,
            subject: q.subject.clone(),
            markings: r.markings,
            question_doubt: question_doubt(r),
            final_option: r.final_option.map(|o| o.option_id.as_char()),
            weight: r.weight().value(),
            srt_s,
            qcl,
            lu,
            response_time_class: class.as_str(),
        });
    }

    let row = |element: String, subset: &QuestionSubset| {
        subset_row(element, spec, &responses, &sequence, &qcls, subset)
    };
    let questionnaire = row(spec.questionnaire_id.clone(), &QuestionSubset::all(spec))?;
    let subjects = spec
        .subjects()
        .into_iter()
        .map(|s| row(s.to_string(), &QuestionSubset::subject(spec, s)))
        .collect::<Result<Vec<_>>>()?;
    let topics = spec
        .topics()
        .into_iter()
        .map(|t| row(t.to_string(), &QuestionSubset::topic(spec, t)))
        .collect::<Result<Vec<_>>>()?;

    Ok(StudentMetrics {
        student_id: session.student_id.clone(),
        responses,
        sequence,
        questions,
        questionnaire,
        subjects,
        topics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub questionnaire_id: String,
    pub student_count: usize,
    pub srt_mode: &'static str,
    #[serde(serialize_with = "fixed4")]
    pub threshold: f64,
    /// How the "General" subject-summary row is formed.
    pub general_row: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupingRow {
    pub k: usize,
    #[serde(serialize_with = "fixed4")]
    pub h: f64,
    pub bounds: Vec<Bound>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Bound(#[serde(serialize_with = "fixed4_pair")] pub (f64, f64));

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerMetric<V> {
    pub ts: V,
    pub ws: V,
    pub ad: V,
    pub qucl: V,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubjectRoster {
    pub subject: String,
    pub roster: BTreeMap<Quadrant, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadrantSection {
    pub overall: BTreeMap<Quadrant, Vec<String>>,
    pub subjects: Vec<SubjectRoster>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingRow {
    pub rank: usize,
    pub element: String,
    #[serde(serialize_with = "fixed4")]
    pub normalized_priority: f64,
}

impl From<&PriorityRanking<f64>> for RankingRow {
    fn from(r: &PriorityRanking<f64>) -> Self {
        RankingRow {
            rank: r.rank,
            element: r.element.to_string(),
            normalized_priority: r.normalized_priority,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrioritySection {
    pub scope: PriorityScope,
    pub subjects: Vec<RankingRow>,
    pub topics: Vec<RankingRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SrtRow {
    pub question_id: QuestionId,
    #[serde(serialize_with = "fixed4")]
    pub mean_srt_s: f64,
    #[serde(serialize_with = "fixed4")]
    pub expected_time_s: f64,
    pub within_expected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubjectSrt {
    pub subject: String,
    pub questions: Vec<SrtRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisorderRow {
    pub element: String,
    #[serde(serialize_with = "fixed4")]
    pub mean: f64,
    #[serde(serialize_with = "fixed4")]
    pub disordered_fraction: f64,
}

/// Class means of a subset's metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub element: String,
    #[serde(serialize_with = "fixed4")]
    pub ts: f64,
    #[serde(serialize_with = "fixed4")]
    pub ws: f64,
    #[serde(serialize_with = "fixed4")]
    pub ad: f64,
    #[serde(serialize_with = "fixed4")]
    pub qucl: f64,
    #[serde(serialize_with = "fixed4")]
    pub srt_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterPoint {
    pub student_id: String,
    #[serde(serialize_with = "fixed4")]
    pub ad: f64,
    #[serde(serialize_with = "fixed4")]
    pub qucl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub no_students: bool,
    pub metadata: Metadata,
    pub grouping: Option<GroupingRow>,
    pub histograms: PerMetric<Vec<usize>>,
    pub approval: PerMetric<ApprovalSplit>,
    pub quadrants: QuadrantSection,
    pub priorities: PrioritySection,
    pub srt_vs_expected: Vec<SubjectSrt>,
    pub disorder: Vec<DisorderRow>,
    pub subject_summary: Vec<SummaryRow>,
    /// Third-quadrant students, lowest comprehension first.
    pub lowest_qucl: Vec<ScatterPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reports {
    pub students: Vec<StudentMetricsReport>,
    pub class: ClassReport,
}

fn unit_metrics(m: &StudentMetrics) -> PerMetric<f64> {
    PerMetric {
        ts: m.questionnaire.ts / 10.0,
        ws: m.questionnaire.ws / 10.0,
        ad: m.questionnaire.ad,
        qucl: m.questionnaire.qucl,
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 { 0.0 } else { sum / n as f64 }
}

fn summary_row(element: String, rows: &[&SubsetRow]) -> SummaryRow {
    SummaryRow {
        element,
        ts: mean(rows.iter().map(|r| r.ts)),
        ws: mean(rows.iter().map(|r| r.ws)),
        ad: mean(rows.iter().map(|r| r.ad)),
        qucl: mean(rows.iter().map(|r| r.qucl)),
        srt_s: mean(rows.iter().map(|r| r.srt_s)),
    }
}

/// Combines per-student metrics (in the order given) into the report set.
pub fn assemble_reports(
    spec: &QuestionnaireSpec,
    students: Vec<StudentMetrics>,
    cfg: &ReportConfig,
) -> Result<Reports> {
    if !(0.0..=1.0).contains(&cfg.threshold) {
        return Err(Error::domain(format!("threshold {} outside [0, 1]", cfg.threshold)));
    }
    let theta = cfg.threshold;
    let metadata = Metadata {
        questionnaire_id: spec.questionnaire_id.clone(),
        student_count: students.len(),
        srt_mode: cfg.srt_mode.as_str(),
        threshold: theta,
        general_row: "computed over all questions",
    };
    let subjects = spec.subjects();

    if students.is_empty() {
        let empty_roster = quadrant_roster::<f64>(&[], theta);
        let zero = ApprovalSplit { at_or_above: 0, below: 0 };
        return Ok(Reports {
            students: Vec::new(),
            class: ClassReport {
                no_students: true,
                metadata,
                grouping: None,
                histograms: PerMetric { ts: vec![], ws: vec![], ad: vec![], qucl: vec![] },
                approval: PerMetric { ts: zero, ws: zero, ad: zero, qucl: zero },
                quadrants: QuadrantSection {
                    overall: empty_roster.clone(),
                    subjects: subjects
                        .iter()
                        .map(|s| SubjectRoster { subject: s.to_string(), roster: empty_roster.clone() })
                        .collect(),
                },
                priorities: PrioritySection { scope: PriorityScope::Class, subjects: vec![], topics: vec![] },
                srt_vs_expected: vec![],
                disorder: vec![],
                subject_summary: vec![],
                lowest_qucl: vec![],
            },
        });
    }

    let scheme: GroupingScheme<f64> = build_grouping(students.len());
    let units: Vec<PerMetric<f64>> = students.iter().map(unit_metrics).collect();
    let column = |f: fn(&PerMetric<f64>) -> f64| units.iter().map(f).collect::<Vec<f64>>();
    let (ts, ws, ad, qucl) = (column(|u| u.ts), column(|u| u.ws), column(|u| u.ad), column(|u| u.qucl));

    let histograms = PerMetric {
        ts: group_histogram(&ts, &scheme)?,
        ws: group_histogram(&ws, &scheme)?,
        ad: group_histogram(&ad, &scheme)?,
        qucl: group_histogram(&qucl, &scheme)?,
    };
    let approval = PerMetric {
        ts: approval_split(&ts, theta),
        ws: approval_split(&ws, theta),
        ad: approval_split(&ad, theta),
        qucl: approval_split(&qucl, theta),
    };

    let points: Vec<(String, f64, f64)> = students
        .iter()
        .map(|m| (m.student_id.clone(), m.questionnaire.ad, m.questionnaire.qucl))
        .collect();
    let subject_rosters = subjects
        .iter()
        .enumerate()
        .map(|(i, s)| SubjectRoster {
            subject: s.to_string(),
            roster: quadrant_roster(
                &students
                    .iter()
                    .map(|m| (m.student_id.clone(), m.subjects[i].ad, m.subjects[i].qucl))
                    .collect::<Vec<_>>(),
                theta,
            ),
        })
        .collect();

    let ranking = |rows: fn(&StudentMetrics) -> &Vec<SubsetRow>, element: fn(&str) -> ElementId| {
        let mut per_element: BTreeMap<ElementId, Vec<(f64, f64)>> = BTreeMap::new();
        for m in &students {
            for r in rows(m) {
                per_element.entry(element(&r.element)).or_default().push((r.ts, r.ws));
            }
        }
        rank_priorities(per_element, PriorityScope::Class)
            .iter()
            .map(RankingRow::from)
            .collect::<Vec<_>>()
    };
    let priorities = PrioritySection {
        scope: PriorityScope::Class,
        subjects: ranking(|m| &m.subjects, |e| ElementId::Subject(e.to_string())),
        topics: ranking(|m| &m.topics, |e| ElementId::Topic(e.parse().expect("topic rows carry numeric ids"))),
    };

    let class_responses: Vec<Responses> = students.iter().map(|m| m.responses.clone()).collect();
    let srt = subjects
        .iter()
        .map(|s| {
            let rows = srt_vs_expected::<f64>(&class_responses, spec, &QuestionSubset::subject(spec, s))?;
            Ok(SubjectSrt {
                subject: s.to_string(),
                questions: rows
                    .into_iter()
                    .map(|c| SrtRow {
                        question_id: c.question_id,
                        mean_srt_s: c.mean_srt_s,
                        expected_time_s: c.expected_time_s,
                        within_expected: c.within_expected,
                    })
                    .collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let sequences: Vec<AnswerSequence> = students.iter().map(|m| m.sequence.clone()).collect();
    let mut disorder = Vec::with_capacity(subjects.len() + 1);
    for s in &subjects {
        let d = disorder_summary::<f64>(&sequences, Some(&QuestionSubset::subject(spec, s).to_set()))?;
        disorder.push(DisorderRow { element: s.to_string(), mean: d.mean, disordered_fraction: d.disordered_fraction });
    }
    let overall = disorder_summary::<f64>(&sequences, None)?;
    disorder.push(DisorderRow {
        element: "General".into(),
        mean: overall.mean,
        disordered_fraction: overall.disordered_fraction,
    });

    let mut subject_summary: Vec<SummaryRow> = subjects
        .iter()
        .enumerate()
        .map(|(i, s)| summary_row(s.to_string(), &students.iter().map(|m| &m.subjects[i]).collect::<Vec<_>>()))
        .collect();
    subject_summary.push(summary_row(
        "General".into(),
        &students.iter().map(|m| &m.questionnaire).collect::<Vec<_>>(),
    ));

    let mut lowest_qucl: Vec<ScatterPoint> = points
        .iter()
        .filter(|(_, a, q)| classify_quadrant(*a, *q, theta) == Quadrant::Q3)
        .map(|(id, a, q)| ScatterPoint { student_id: id.clone(), ad: *a, qucl: *q })
        .collect();
    lowest_qucl.sort_by(|a, b| a.qucl.total_cmp(&b.qucl).then_with(|| a.student_id.cmp(&b.student_id)));

    let class = ClassReport {
        no_students: false,
        metadata,
        grouping: Some(GroupingRow {
            k: scheme.k,
            h: scheme.h,
            bounds: scheme.bounds.iter().map(|&b| Bound(b)).collect(),
        }),
        histograms,
        approval,
        quadrants: QuadrantSection { overall: quadrant_roster(&points, theta), subjects: subject_rosters },
        priorities,
        srt_vs_expected: srt,
        disorder,
        subject_summary,
        lowest_qucl,
    };

    let reports = students
        .into_iter()
        .zip(&units)
        .map(|(m, u)| {
            Ok(StudentMetricsReport {
                quadrant: classify_quadrant(m.questionnaire.ad, m.questionnaire.qucl, theta),
                groups: GroupIndices {
                    ts: assign_group(u.ts, &scheme)?,
                    ws: assign_group(u.ws, &scheme)?,
                    ad: assign_group(u.ad, &scheme)?,
                    qucl: assign_group(u.qucl, &scheme)?,
                },
                student_id: m.student_id,
                questions: m.questions,
                questionnaire: m.questionnaire,
                subjects: m.subjects,
                topics: m.topics,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Reports { students: reports, class })
}

/// Sequential convenience wrapper: per-student metrics then assembly.
pub fn build_reports(
    spec: &QuestionnaireSpec,
    sessions: &[StudentSession],
    cfg: &ReportConfig,
) -> Result<Reports> {
    let metrics = sessions
        .iter()
        .map(|s| compute_student(spec, s, cfg))
        .collect::<Result<Vec<_>>>()?;
    assemble_reports(spec, metrics, cfg)
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn students_json(students: &[StudentMetricsReport]) -> String {
    to_pretty_json(&students)
}

pub fn class_json(class: &ClassReport) -> String {
    to_pretty_json(class)
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

const SUBSET_HEADER: [&str; 15] = [
    "student_id", "scope", "element", "question_count", "ts", "ws", "error_rate", "ad", "srt_s",
    "disorder", "qucl", "priority", "quadrant", "group_ts", "group_qucl",
];

/// Flattened subset rows: one line per student and questionnaire/subject/topic.
pub fn students_subsets_csv(students: &[StudentMetricsReport]) -> String {
    let rows = students.iter().flat_map(|s| {
        std::iter::once(("questionnaire", &s.questionnaire))
            .chain(s.subjects.iter().map(|r| ("subject", r)))
            .chain(s.topics.iter().map(|r| ("topic", r)))
            .map(move |(scope, r)| {
                vec![
                    s.student_id.clone(),
                    scope.to_string(),
                    r.element.clone(),
                    r.question_count.to_string(),
                    format_fixed4(r.ts),
                    format_fixed4(r.ws),
                    format_fixed4(r.error_rate),
                    format_fixed4(r.ad),
                    format_fixed4(r.srt_s),
                    format_fixed4(r.disorder),
                    format_fixed4(r.qucl),
                    format_fixed4(r.priority),
                    s.quadrant.to_string(),
                    s.groups.ts.to_string(),
                    s.groups.qucl.to_string(),
                ]
            })
    });
    csv_table(&SUBSET_HEADER, rows)
}

/// Flattened question rows: one line per student and question.
pub fn students_questions_csv(students: &[StudentMetricsReport]) -> String {
    let header = [
        "student_id", "question_id", "subject", "markings", "question_doubt", "final_option", "weight",
        "srt_s", "qcl", "lu", "response_time_class",
    ];
    let rows = students.iter().flat_map(|s| {
        s.questions.iter().map(move |q| {
            vec![
                s.student_id.clone(),
                q.question_id.to_string(),
                q.subject.clone(),
                q.markings.to_string(),
                q.question_doubt.to_string(),
                q.final_option.map(String::from).unwrap_or_default(),
                q.weight.to_string(),
                format_fixed4(q.srt_s),
                format_fixed4(q.qcl),
                format_fixed4(q.lu),
                q.response_time_class.to_string(),
            ]
        })
    });
    csv_table(&header, rows)
}

/// Student counts per group for each unit-scale metric.
pub fn groups_histogram_csv(class: &ClassReport) -> String {
    let header = ["group", "floor", "ceiling", "ts", "ws", "ad", "qucl"];
    let rows = class.grouping.iter().flat_map(|g| {
        g.bounds.iter().enumerate().map(|(i, Bound((lo, hi)))| {
            let h = &class.histograms;
            vec![
                (i + 1).to_string(),
                format_fixed4(*lo),
                format_fixed4(*hi),
                h.ts[i].to_string(),
                h.ws[i].to_string(),
                h.ad[i].to_string(),
                h.qucl[i].to_string(),
            ]
        })
    });
    csv_table(&header, rows)
}

pub fn ad_qucl_scatter_csv(students: &[StudentMetricsReport]) -> String {
    let rows = students.iter().map(|s| {
        vec![
            s.student_id.clone(),
            format_fixed4(s.questionnaire.ad),
            format_fixed4(s.questionnaire.qucl),
            s.quadrant.to_string(),
        ]
    });
    csv_table(&["student_id", "ad", "qucl", "quadrant"], rows)
}

pub fn subject_srt_csv(class: &ClassReport) -> String {
    let rows = class.srt_vs_expected.iter().flat_map(|s| {
        s.questions.iter().map(move |q| {
            vec![
                s.subject.clone(),
                q.question_id.to_string(),
                format_fixed4(q.mean_srt_s),
                format_fixed4(q.expected_time_s),
                q.within_expected.to_string(),
            ]
        })
    });
    csv_table(&["subject", "question_id", "mean_srt_s", "expected_time_s", "within_expected"], rows)
}

/// Plot-data files as `(file name, contents)`.
pub fn plot_data(reports: &Reports) -> Vec<(&'static str, String)> {
    vec![
        ("groups_histogram.csv", groups_histogram_csv(&reports.class)),
        ("ad_qucl_scatter.csv", ad_qucl_scatter_csv(&reports.students)),
        ("subject_srt.csv", subject_srt_csv(&reports.class)),
    ]
}

/// Short human-readable summary with times in `MM:SS`.
pub fn text_summary(reports: &Reports) -> String {
    let c = &reports.class;
    let mut out = format!(
        "{}: {} students, response times from {} intervals\n",
        c.metadata.questionnaire_id, c.metadata.student_count, c.metadata.srt_mode
    );
    if c.no_students {
        out.push_str("no students\n");
        return out;
    }
    for row in &c.subject_summary {
        out.push_str(&format!(
            "  {:<24} TS {:>7}  AD {:>6}  QuCL {:>6}  time {}\n",
            row.element,
            format_fixed4(row.ts),
            format_fixed4(row.ad),
            format_fixed4(row.qucl),
            format_mmss(row.srt_s)
        ));
    }
    let counts: Vec<String> = c
        .quadrants
        .overall
        .iter()
        .map(|(q, ids)| format!("{q}={}", ids.len()))
        .collect();
    out.push_str(&format!("  quadrants: {}\n", counts.join(" ")));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudentRate {
    pub student_id: String,
    pub scores: Vec<Fixed4>,
    #[serde(serialize_with = "fixed4")]
    pub slr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Fixed4(#[serde(serialize_with = "fixed4")] pub f64);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementRates {
    pub element: String,
    pub students: Vec<StudentRate>,
    /// Mean learning rate, absent when no student has two or more scores.
    pub difficulty_level: Option<Fixed4>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearningRateReport {
    pub assessments: usize,
    pub elements: Vec<ElementRates>,
}

/// Learning rate per subject from successive assessments of the same
/// questionnaire. Scores are traditional scores; students with fewer than two
/// assessments are left out.
pub fn learning_rate_report(
    spec: &QuestionnaireSpec,
    assessments: &[Vec<StudentSession>],
    srt_mode: SrtMode,
) -> Result<LearningRateReport> {
    let mut scores: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    let subjects = spec.subjects();
    for sessions in assessments {
        for s in sessions {
            let r = derive_responses(s, spec, srt_mode);
            for subject in &subjects {
                let ts: f64 = traditional_score(&r, spec, &QuestionSubset::subject(spec, subject))?;
                scores.entry((subject.to_string(), s.student_id.clone())).or_default().push(ts);
            }
        }
    }

    let mut elements = Vec::with_capacity(subjects.len());
    for subject in &subjects {
        let mut students = Vec::new();
        let from = (subject.to_string(), String::new());
        for ((_, student), series) in scores.range(from..).take_while(|((e, _), _)| e == subject) {
            if series.len() < 2 {
                continue;
            }
            let slr = student_learning_rate(&ScoreSeries::new(student.clone(), subject.to_string(), series.clone()))?;
            students.push(StudentRate { student_id: student.clone(), scores: series.iter().map(|&v| Fixed4(v)).collect(), slr });
        }
        let slrs: Vec<f64> = students.iter().map(|s| s.slr).collect();
        elements.push(ElementRates {
            element: subject.to_string(),
            difficulty_level: difficulty_level(&slrs).ok().map(Fixed4),
            students,
        });
    }
    Ok(LearningRateReport { assessments: assessments.len(), elements })
}

pub fn learning_rate_json(report: &LearningRateReport) -> String {
    to_pretty_json(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{AssessmentEvent, OptionId};
    use crate::testutil::spec_with_weights;

    fn opt(c: char) -> OptionId {
        OptionId::new(c).unwrap()
    }

    #[test]
    fn fixed4_rounding() {
        assert_eq!(format_fixed4(0.5), "0.5000");
        assert_eq!(format_fixed4(2.0 / 3.0), "0.6667");
        assert_eq!(format_fixed4(-1e-9), "0.0000");
        assert_eq!(format_fixed4(10.0), "10.0000");
        assert_eq!(format_fixed4(0.99994), "0.9999");
        assert_eq!(format_fixed4(0.99996), "1.0000");
    }

    #[test]
    fn mmss() {
        assert_eq!(format_mmss(286.6), "04:47");
        assert_eq!(format_mmss(137.0), "02:17");
        assert_eq!(format_mmss(180.0), "03:00");
        assert_eq!(format_mmss(7265.0), "121:05");
    }

    fn session(id: &str, answers: &[(u32, char, u64)]) -> StudentSession {
        let mut events = vec![AssessmentEvent::view(id, QuestionId(1), 0)];
        for &(q, o, t) in answers {
            events.push(AssessmentEvent::answer(id, QuestionId(q), opt(o), t));
        }
        StudentSession::from_events(id, events)
    }

    #[test]
    fn student_report_rows() {
        let spec = spec_with_weights(3);
        let s = session("s1", &[(1, 'a', 30_000), (2, 'b', 60_000), (3, 'a', 90_000)]);
        let cfg = ReportConfig::new(SrtMode::AnswerIntervals);
        let r = build_reports(&spec, &[s], &cfg).unwrap();
        let st = &r.students[0];
        assert_eq!(st.questions.len(), 3);
        assert_eq!(st.subjects.len(), 1);
        assert_eq!(st.topics.len(), 1);
        assert!((st.questionnaire.ts - 20.0 / 3.0).abs() < 1e-12);
        assert!((st.questionnaire.ws - 10.0 * 11.0 / 12.0).abs() < 1e-12);
        assert_eq!(st.questions[0].srt_s, 30.0);
        assert_eq!(st.questions[1].qcl, 0.75);
        assert_eq!(st.questions[1].response_time_class, "normal");
        assert_eq!(st.quadrant, Quadrant::Q1);
        assert_eq!(r.class.grouping.as_ref().unwrap().k, 1);
        let json = students_json(&r.students);
        assert!(json.contains("\"ts\": 6.6667"));
        assert!(json.contains("\"qcl\": 0.7500"));
    }

    #[test]
    fn empty_class_has_marker() {
        let spec = spec_with_weights(2);
        let r = build_reports(&spec, &[], &ReportConfig::new(SrtMode::ViewIntervals)).unwrap();
        assert!(r.students.is_empty());
        assert_eq!(students_json(&r.students), "[]\n");
        let class = class_json(&r.class);
        assert!(class.contains("\"no_students\": true"));
        assert!(class.contains("\"grouping\": null"));
    }

    #[test]
    fn class_report_partitions_students() {
        let spec = spec_with_weights(4);
        let sessions: Vec<StudentSession> = (0..9)
            .map(|i| {
                let o = if i % 2 == 0 { 'a' } else { 'e' };
                session(&format!("s{i}"), &[(1, o, 40_000), (2, o, 80_000), (3, 'a', 120_000), (4, o, 160_000)])
            })
            .collect();
        let r = build_reports(&spec, &sessions, &ReportConfig::new(SrtMode::AnswerIntervals)).unwrap();
        assert_eq!(r.class.grouping.as_ref().unwrap().k, 3);
        let total: usize = r.class.quadrants.overall.values().map(Vec::len).sum();
        assert_eq!(total, 9);
        assert_eq!(r.class.histograms.ts.iter().sum::<usize>(), 9);
        assert_eq!(r.class.approval.ts.at_or_above + r.class.approval.ts.below, 9);
        assert_eq!(r.class.subject_summary.last().unwrap().element, "General");
        assert_eq!(r.class.priorities.subjects.len(), 1);
        assert!(r.class.lowest_qucl.windows(2).all(|w| w[0].qucl <= w[1].qucl));
        for (name, csv) in plot_data(&r) {
            assert!(csv.lines().count() > 1, "{name}");
        }
        assert_eq!(class_json(&r.class), class_json(&r.class));
    }

    #[test]
    fn learning_rates_from_two_logs() {
        let spec = spec_with_weights(2);
        let first = vec![session("s", &[(1, 'e', 10_000), (2, 'e', 20_000)])];
        let second = vec![session("s", &[(1, 'a', 10_000), (2, 'e', 20_000)])];
        let r = learning_rate_report(&spec, &[first, second], SrtMode::AnswerIntervals).unwrap();
        assert_eq!(r.assessments, 2);
        assert_eq!(r.elements[0].students[0].slr, 25.0);
        assert_eq!(r.elements[0].difficulty_level, Some(Fixed4(25.0)));
    }
}
