use std::collections::BTreeSet;

use proptest::prelude::*;

use edumetrics::composite::{question_comprehension_level, questionnaire_comprehension_level, ComprehensionInputs};
use edumetrics::isolated::{assurance_degree, traditional_score, weighted_score, QuestionSubset};
use edumetrics::report::{build_reports, class_json, students_json, ReportConfig};
use edumetrics::simulator::{simulate_class, BehaviorKind, ProfileParams};
use edumetrics::{
    derive_answer_sequence, derive_responses, parse_event_log, parse_questionnaire, write_event_log, Exact,
    QuestionnaireSpec, SrtMode,
};

/// Questions described as (subject index, topic ids, qdi, expected seconds, position of the correct option).
fn spec_json(questions: &[(usize, Vec<u32>, u8, u32, usize)]) -> String {
    let qs: Vec<String> = questions
        .iter()
        .enumerate()
        .map(|(i, (subject, topics, qdi, t, correct))| {
            let mut rest = [3, 2, 1, 0].into_iter();
            let opts: Vec<String> = (0..5)
                .map(|k| {
                    let w = if k == *correct { 4 } else { rest.next().unwrap() };
                    format!(r#"{{"option_id": "{}", "ws_weight": {w}}}"#, (b'a' + k as u8) as char)
                })
                .collect();
            let topics: Vec<String> = topics.iter().map(u32::to_string).collect();
            format!(
                r#"{{"question_id": {}, "subject": "subject-{subject}", "topic_ids": [{}], "qdi": {qdi}, "cdi": 3, "tdi": 1, "expected_time_s": {t}, "options": [{}]}}"#,
                i + 1,
                topics.join(","),
                opts.join(",")
            )
        })
        .collect();
    format!(r#"{{"questionnaire_id": "p", "max_total_time_s": 50000, "questions": [{}]}}"#, qs.join(","))
}

fn arb_spec() -> impl Strategy<Value = QuestionnaireSpec> {
    let question = (
        0usize..3,
        proptest::collection::btree_set(1u32..6, 1..3).prop_map(|s| s.into_iter().collect::<Vec<_>>()),
        prop_oneof![Just(1u8), Just(3), Just(5)],
        10u32..400,
        0usize..5,
    );
    proptest::collection::vec(question, 1..10).prop_map(|qs| parse_questionnaire(&spec_json(&qs)).unwrap())
}

fn arb_kind() -> impl Strategy<Value = BehaviorKind> {
    prop_oneof![
        Just(BehaviorKind::Assured),
        Just(BehaviorKind::Guesser),
        Just(BehaviorKind::SelfCorrector),
        Just(BehaviorKind::Disordered),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn questionnaire_json_round_trips(spec in arb_spec()) {
        prop_assert_eq!(parse_questionnaire(&spec.to_json()).unwrap(), spec);
    }

    #[test]
    fn event_log_round_trips(spec in arb_spec(), kind in arb_kind(), seed in any::<u64>(), count in 0usize..5) {
        let sessions = simulate_class(kind, &ProfileParams::for_kind(kind), &spec, count, seed).unwrap();
        let text = write_event_log(&sessions);
        let parsed = parse_event_log(&text, &spec).unwrap();
        prop_assert_eq!(&parsed, &sessions);
        prop_assert_eq!(write_event_log(&parsed), text);
    }

    #[test]
    fn view_time_is_partitioned(spec in arb_spec(), kind in arb_kind(), seed in any::<u64>()) {
        let sessions = simulate_class(kind, &ProfileParams::for_kind(kind), &spec, 1, seed).unwrap();
        let s = &sessions[0];
        let r = derive_responses(s, &spec, SrtMode::ViewIntervals);
        let total: u64 = r.values().map(|x| x.srt_ms).sum();
        prop_assert_eq!(total, s.session_end_ms - s.first_timestamp_ms().unwrap());
        let markings: u32 = r.values().map(|x| x.markings).sum();
        prop_assert_eq!(markings as usize, derive_answer_sequence(s).len());
    }

    #[test]
    fn exact_and_float_agree(spec in arb_spec(), kind in arb_kind(), seed in any::<u64>()) {
        let sessions = simulate_class(kind, &ProfileParams::for_kind(kind), &spec, 1, seed).unwrap();
        let r = derive_responses(&sessions[0], &spec, SrtMode::ViewIntervals);
        let all = QuestionSubset::all(&spec);
        let to_f = |x: Exact| *x.numer() as f64 / *x.denom() as f64;
        let ts_e: Exact = traditional_score(&r, &spec, &all).unwrap();
        let ws_e: Exact = weighted_score(&r, &spec, &all).unwrap();
        let ad_e: Exact = assurance_degree(&r, &spec, &all).unwrap();
        prop_assert!((to_f(ts_e) - traditional_score::<f64>(&r, &spec, &all).unwrap()).abs() < 1e-12);
        prop_assert!((to_f(ws_e) - weighted_score::<f64>(&r, &spec, &all).unwrap()).abs() < 1e-12);
        prop_assert!((to_f(ad_e) - assurance_degree::<f64>(&r, &spec, &all).unwrap()).abs() < 1e-12);
        let mut qcl_f = Vec::new();
        for q in &spec.questions {
            let resp = &r[&q.question_id];
            let e: Exact = question_comprehension_level(&ComprehensionInputs::for_response(q, resp));
            let f: f64 = question_comprehension_level(&ComprehensionInputs::for_response(q, resp));
            prop_assert!((to_f(e) - f).abs() < 1e-12);
            qcl_f.push(f);
        }
        let qucl = questionnaire_comprehension_level(&qcl_f, to_f(ad_e), spec.len()).unwrap();
        prop_assert!((0.0..=1.0).contains(&qucl));
    }

    #[test]
    fn reports_cover_every_element_once(spec in arb_spec(), kind in arb_kind(), seed in any::<u64>(), count in 1usize..6) {
        let sessions = simulate_class(kind, &ProfileParams::for_kind(kind), &spec, count, seed).unwrap();
        let cfg = ReportConfig::new(SrtMode::ViewIntervals);
        let reports = build_reports(&spec, &sessions, &cfg).unwrap();
        prop_assert_eq!(reports.students.len(), count);
        for st in &reports.students {
            let qids: Vec<_> = st.questions.iter().map(|q| q.question_id).collect();
            prop_assert_eq!(qids, spec.question_ids().collect::<Vec<_>>());
            let subjects: Vec<&str> = st.subjects.iter().map(|r| r.element.as_str()).collect();
            prop_assert_eq!(subjects, spec.subjects());
            let topics: BTreeSet<String> = st.topics.iter().map(|r| r.element.clone()).collect();
            prop_assert_eq!(topics.len(), st.topics.len());
            prop_assert_eq!(topics.len(), spec.topics().len());
        }
        let roster: usize = reports.class.quadrants.overall.values().map(Vec::len).sum();
        prop_assert_eq!(roster, count);
        let again = build_reports(&spec, &sessions, &cfg).unwrap();
        prop_assert_eq!(students_json(&again.students), students_json(&reports.students));
        prop_assert_eq!(class_json(&again.class), class_json(&reports.class));
    }
}

#[test]
fn decimals_have_four_digits() {
    let spec = parse_questionnaire(&spec_json(&[(0, vec![1], 3, 90, 0), (1, vec![2], 5, 120, 2)])).unwrap();
    let sessions = simulate_class(BehaviorKind::SelfCorrector, &ProfileParams::for_kind(BehaviorKind::SelfCorrector), &spec, 4, 11).unwrap();
    let reports = build_reports(&spec, &sessions, &ReportConfig::new(SrtMode::ViewIntervals)).unwrap();
    let json = students_json(&reports.students) + &class_json(&reports.class);
    for line in json.lines() {
        let value = line.trim().trim_end_matches(',').rsplit(": ").next().unwrap();
        if let Some((_, frac)) = value.split_once('.') {
            if value.chars().all(|c| c.is_ascii_digit() || c == '.' || c == '-') {
                assert_eq!(frac.len(), 4, "{line}");
            }
        }
    }
}
