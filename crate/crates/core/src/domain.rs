//! Questionnaire and event-log domain types, plus the two interchange formats:
//! the questionnaire JSON document and the event CSV log.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// 1-based position of a question in its questionnaire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct QuestionId(pub u32);

impl fmt::Display for QuestionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Single lowercase letter naming an answer option.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OptionId(char);

impl OptionId {
    pub fn new(c: char) -> Option<Self> {
        c.is_ascii_lowercase().then_some(OptionId(c))
    }

    pub fn parse(s: &str) -> Option<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Self::new(c),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        self.0
    }
}

impl fmt::Display for OptionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for OptionId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Question, content or topic difficulty: 1 (easy), 3 (medium) or 5 (hard).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct DifficultyIndex(u8);

impl DifficultyIndex {
    pub const EASY: Self = DifficultyIndex(1);
    pub const MEDIUM: Self = DifficultyIndex(3);
    pub const HARD: Self = DifficultyIndex(5);

    pub fn new(value: i64) -> Option<Self> {
        matches!(value, 1 | 3 | 5).then(|| DifficultyIndex(value as u8))
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

/// Credit of an answer option, 0 (no idea) through 4 (match).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct AnswerWeight(u8);

impl AnswerWeight {
    pub const NONE: Self = AnswerWeight(0);
    pub const CORRECT: Self = AnswerWeight(4);

    pub fn new(value: i64) -> Option<Self> {
        (0..=4).contains(&value).then_some(AnswerWeight(value as u8))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_correct(self) -> bool {
        self == Self::CORRECT
    }

    /// Deviation used when an option does not declare one: 4→5, 3→4, 2→3, 1→2, 0→0.
    pub fn default_deviation(self) -> Deviation {
        Deviation(match self.0 {
            0 => 0,
            w => w + 1,
        })
    }
}

/// Deviation parameter of the level-of-understanding metric: one of 0, 2, 3, 4, 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Deviation(u8);

impl Deviation {
    pub fn new(value: i64) -> Option<Self> {
        matches!(value, 0 | 2 | 3 | 4 | 5).then(|| Deviation(value as u8))
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AnswerOption {
    pub option_id: OptionId,
    pub ws_weight: AnswerWeight,
    pub lu_deviation: Deviation,
}

impl AnswerOption {
    pub fn new(option_id: OptionId, ws_weight: AnswerWeight) -> Self {
        AnswerOption {
            option_id,
            ws_weight,
            lu_deviation: ws_weight.default_deviation(),
        }
    }

    pub fn is_correct(&self) -> bool {
        self.ws_weight.is_correct()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionSpec {
    pub question_id: QuestionId,
    pub subject: String,
    pub topic_ids: BTreeSet<u32>,
    pub qdi: DifficultyIndex,
    pub cdi: DifficultyIndex,
    pub tdi: DifficultyIndex,
    pub expected_time_s: f64,
    pub options: Vec<AnswerOption>,
}

impl QuestionSpec {
    pub fn option(&self, id: OptionId) -> Option<&AnswerOption> {
        self.options.iter().find(|o| o.option_id == id)
    }

    pub fn correct_option(&self) -> &AnswerOption {
        self.options
            .iter()
            .find(|o| o.is_correct())
            .expect("validated question has a correct option")
    }

    /// Expected time in whole milliseconds.
    pub fn expected_time_ms(&self) -> u64 {
        (self.expected_time_s * 1000.0).round() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionnaireSpec {
    pub questionnaire_id: String,
    pub max_total_time_s: f64,
    pub questions: Vec<QuestionSpec>,
}

impl QuestionnaireSpec {
    pub fn len(&self) -> usize {
        self.questions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.questions.is_empty()
    }

    /// Maximum weighted punctuation, `|q| * 4`.
    pub fn mwp(&self) -> usize {
        self.questions.len() * 4
    }

    pub fn question(&self, id: QuestionId) -> Option<&QuestionSpec> {
        (id.0 as usize)
            .checked_sub(1)
            .and_then(|i| self.questions.get(i))
            .filter(|q| q.question_id == id)
    }

    pub fn question_ids(&self) -> impl Iterator<Item = QuestionId> + '_ {
        self.questions.iter().map(|q| q.question_id)
    }

    /// Distinct subjects, sorted.
    pub fn subjects(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self.questions.iter().map(|q| q.subject.as_str()).collect();
        set.into_iter().collect()
    }

    /// Distinct topic ids, sorted.
    pub fn topics(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self
            .questions
            .iter()
            .flat_map(|q| q.topic_ids.iter().copied())
            .collect();
        set.into_iter().collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("questionnaire serializes")
    }
}

/// Parser switches.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept any number of options per question instead of exactly five.
    pub allow_any_option_count: bool,
}

pub const OPTIONS_PER_QUESTION: usize = 5;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuestionnaire {
    questionnaire_id: String,
    max_total_time_s: f64,
    questions: Vec<RawQuestion>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuestion {
    question_id: i64,
    subject: String,
    topic_ids: Vec<i64>,
    qdi: i64,
    cdi: i64,
    tdi: i64,
    expected_time_s: f64,
    options: Vec<RawOption>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOption {
    option_id: String,
    ws_weight: i64,
    #[serde(default)]
    lu_deviation: Option<i64>,
}

pub fn parse_questionnaire(text: &str) -> Result<QuestionnaireSpec> {
    parse_questionnaire_with(text, ParseOptions::default())
}

pub fn parse_questionnaire_with(text: &str, opts: ParseOptions) -> Result<QuestionnaireSpec> {
    let raw: RawQuestionnaire = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    if raw.questions.is_empty() {
        return Err(Error::validation(
            "questions",
            None,
            "questionnaire has no questions",
        ));
    }
    if !(raw.max_total_time_s.is_finite() && raw.max_total_time_s > 0.0) {
        return Err(Error::validation(
            "max_total_time_s",
            None,
            format!("must be positive, got {}", raw.max_total_time_s),
        ));
    }

    let questions = raw
        .questions
        .into_iter()
        .enumerate()
        .map(|(pos, q)| validate_question(pos, q, opts))
        .collect::<Result<Vec<_>>>()?;

    Ok(QuestionnaireSpec {
        questionnaire_id: raw.questionnaire_id,
        max_total_time_s: raw.max_total_time_s,
        questions,
    })
}

fn validate_question(pos: usize, raw: RawQuestion, opts: ParseOptions) -> Result<QuestionSpec> {
    let expected_id = pos as i64 + 1;
    if raw.question_id != expected_id {
        let qid = u32::try_from(raw.question_id).ok().map(QuestionId);
        return Err(Error::validation(
            "question_id",
            qid,
            format!(
                "question ids must be contiguous from 1; expected {expected_id}, got {}",
                raw.question_id
            ),
        ));
    }
    let id = QuestionId(expected_id as u32);
    let invalid = |field: &str, msg: String| Error::validation(field, Some(id), msg);

    let difficulty = |field: &str, v: i64| {
        DifficultyIndex::new(v).ok_or_else(|| invalid(field, format!("must be 1, 3 or 5, got {v}")))
    };
    let qdi = difficulty("qdi", raw.qdi)?;
    let cdi = difficulty("cdi", raw.cdi)?;
    let tdi = difficulty("tdi", raw.tdi)?;

    if raw.subject.is_empty() {
        return Err(invalid("subject", "must not be empty".into()));
    }
    if !(raw.expected_time_s.is_finite() && raw.expected_time_s > 0.0) {
        return Err(invalid(
            "expected_time_s",
            format!("must be positive, got {}", raw.expected_time_s),
        ));
    }
    let topic_ids = raw
        .topic_ids
        .iter()
        .map(|&t| u32::try_from(t).map_err(|_| invalid("topic_ids", format!("invalid topic id {t}"))))
        .collect::<Result<BTreeSet<u32>>>()?;

    if !opts.allow_any_option_count && raw.options.len() != OPTIONS_PER_QUESTION {
        return Err(invalid(
            "options",
            format!(
                "expected {OPTIONS_PER_QUESTION} options, got {}",
                raw.options.len()
            ),
        ));
    }

    let mut options = Vec::with_capacity(raw.options.len());
    for o in raw.options {
        let option_id = OptionId::parse(&o.option_id)
            .filter(|oid| opts.allow_any_option_count || ('a'..='e').contains(&oid.as_char()))
            .ok_or_else(|| invalid("option_id", format!("invalid option id {:?}", o.option_id)))?;
        if options.iter().any(|p: &AnswerOption| p.option_id == option_id) {
            return Err(invalid("option_id", format!("duplicate option id {option_id}")));
        }
        let ws_weight = AnswerWeight::new(o.ws_weight).ok_or_else(|| {
            invalid("ws_weight", format!("must be in 0..=4, got {}", o.ws_weight))
        })?;
        let lu_deviation = match o.lu_deviation {
            None => ws_weight.default_deviation(),
            Some(d) => Deviation::new(d).ok_or_else(|| {
                invalid("lu_deviation", format!("must be one of 0, 2, 3, 4, 5, got {d}"))
            })?,
        };
        options.push(AnswerOption {
            option_id,
            ws_weight,
            lu_deviation,
        });
    }

    let correct = options.iter().filter(|o| o.is_correct()).count();
    if correct != 1 {
        return Err(invalid(
            "ws_weight",
            format!("exactly one option must have weight 4, found {correct}"),
        ));
    }

    Ok(QuestionSpec {
        question_id: id,
        subject: raw.subject,
        topic_ids,
        qdi,
        cdi,
        tdi,
        expected_time_s: raw.expected_time_s,
        options,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    View,
    Answer,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::View => "view",
            EventKind::Answer => "answer",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssessmentEvent {
    pub student_id: String,
    pub question_id: QuestionId,
    pub kind: EventKind,
    /// Present iff `kind == Answer`.
    pub option_id: Option<OptionId>,
    pub timestamp_ms: u64,
}

impl AssessmentEvent {
    pub fn view(student_id: &str, question_id: QuestionId, timestamp_ms: u64) -> Self {
        AssessmentEvent {
            student_id: student_id.to_owned(),
            question_id,
            kind: EventKind::View,
            option_id: None,
            timestamp_ms,
        }
    }

    pub fn answer(
        student_id: &str,
        question_id: QuestionId,
        option_id: OptionId,
        timestamp_ms: u64,
    ) -> Self {
        AssessmentEvent {
            student_id: student_id.to_owned(),
            question_id,
            kind: EventKind::Answer,
            option_id: Some(option_id),
            timestamp_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StudentSession {
    pub student_id: String,
    pub events: Vec<AssessmentEvent>,
    pub session_end_ms: u64,
}

impl StudentSession {
    /// Builds a session, sorting events stably by timestamp and taking the
    /// session end from the last event.
    pub fn from_events(student_id: impl Into<String>, mut events: Vec<AssessmentEvent>) -> Self {
        events.sort_by_key(|e| e.timestamp_ms);
        let session_end_ms = events.last().map_or(0, |e| e.timestamp_ms);
        StudentSession {
            student_id: student_id.into(),
            events,
            session_end_ms,
        }
    }

    pub fn first_timestamp_ms(&self) -> Option<u64> {
        self.events.first().map(|e| e.timestamp_ms)
    }
}

pub const EVENT_LOG_HEADER: &str = "student_id,question_id,event,option_id,timestamp_ms";

const END_EVENT: &str = "end";

/// Parses the event CSV against a questionnaire.
///
/// Sessions come out in order of each student's first row. Besides `view` and
/// `answer`, an `end` row (empty `question_id` and `option_id`) may fix the
/// session end explicitly; it is not an event.
pub fn parse_event_log(text: &str, spec: &QuestionnaireSpec) -> Result<Vec<StudentSession>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .quoting(false)
        .flexible(false)
        .from_reader(text.as_bytes());

    let header = reader.headers().map_err(csv_error)?;
    let header_line = header.iter().collect::<Vec<_>>().join(",");
    if header_line != EVENT_LOG_HEADER {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("expected header `{EVENT_LOG_HEADER}`, got `{header_line}`"),
        });
    }

    let mut order: Vec<String> = Vec::new();
    let mut by_student: HashMap<String, (Vec<AssessmentEvent>, Option<u64>)> = HashMap::new();

    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| record.get(i).unwrap_or("");
        let syntax = |column: usize, name: &str, value: &str| Error::Parse {
            line,
            column,
            message: format!("invalid {name} {value:?}"),
        };

        let student_id = field(0);
        if student_id.is_empty() {
            return Err(Error::validation("student_id", None, "must not be empty").at_line(line));
        }
        let timestamp_ms: u64 = field(4)
            .parse()
            .map_err(|_| syntax(5, "timestamp_ms", field(4)))?;

        let entry = by_student.entry(student_id.to_owned()).or_insert_with(|| {
            order.push(student_id.to_owned());
            (Vec::new(), None)
        });

        let kind = match field(2) {
            "view" => EventKind::View,
            "answer" => EventKind::Answer,
            END_EVENT => {
                if entry.1.replace(timestamp_ms).is_some() {
                    return Err(Error::validation(
                        "event",
                        None,
                        format!("duplicate end row for student {student_id}"),
                    )
                    .at_line(line));
                }
                continue;
            }
            other => return Err(syntax(3, "event", other)),
        };

        let qid_raw: u32 = field(1).parse().map_err(|_| syntax(2, "question_id", field(1)))?;
        let question_id = QuestionId(qid_raw);
        let question = spec.question(question_id).ok_or_else(|| {
            Error::validation(
                "question_id",
                Some(question_id),
                format!("question {question_id} is not in questionnaire"),
            )
            .at_line(line)
        })?;

        let option_id = match (kind, field(3)) {
            (EventKind::View, "") => None,
            (EventKind::View, o) => {
                return Err(Error::validation(
                    "option_id",
                    Some(question_id),
                    format!("view rows carry no option, got {o:?}"),
                )
                .at_line(line))
            }
            (EventKind::Answer, o) => {
                let oid = OptionId::parse(o)
                    .filter(|&oid| question.option(oid).is_some())
                    .ok_or_else(|| {
                        Error::validation(
                            "option_id",
                            Some(question_id),
                            format!("option {o:?} does not exist for question {question_id}"),
                        )
                        .at_line(line)
                    })?;
                Some(oid)
            }
        };

        entry.0.push(AssessmentEvent {
            student_id: student_id.to_owned(),
            question_id,
            kind,
            option_id,
            timestamp_ms,
        });
    }

    order
        .into_iter()
        .map(|student_id| {
            let (events, end) = by_student.remove(&student_id).expect("student recorded");
            let mut session = StudentSession::from_events(student_id, events);
            if let Some(end) = end {
                if session.events.last().is_some_and(|e| e.timestamp_ms > end) {
                    return Err(Error::validation(
                        "timestamp_ms",
                        None,
                        format!(
                            "end row at {end} precedes the last event of student {}",
                            session.student_id
                        ),
                    ));
                }
                session.session_end_ms = end;
            }
            Ok(session)
        })
        .collect()
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        line,
        column: 0,
        message: e.to_string(),
    }
}

/// Writes sessions in the canonical event CSV. An `end` row is added only
/// when the session end differs from its last event.
pub fn write_event_log(sessions: &[StudentSession]) -> String {
    let mut out = String::with_capacity(64 * (1 + sessions.len()));
    out.push_str(EVENT_LOG_HEADER);
    out.push('\n');
    for session in sessions {
        for e in &session.events {
            let option = e.option_id.map(|o| o.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                e.student_id,
                e.question_id,
                e.kind.as_str(),
                option,
                e.timestamp_ms
            ));
        }
        if session.events.last().map(|e| e.timestamp_ms) != Some(session.session_end_ms) {
            out.push_str(&format!(
                "{},,{END_EVENT},,{}\n",
                session.student_id, session.session_end_ms
            ));
        }
    }
    out
}
