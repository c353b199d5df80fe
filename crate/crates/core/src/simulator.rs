//! Seeded synthetic students with known metric expectations.
//!
//! Randomness comes from SplitMix64, chosen for its one-line state update so
//! other implementations can reproduce the same sessions:
//!
//! ```text
//! state  = state + 0x9E3779B97F4A7C15            (wrapping)
//! z      = state
//! z      = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9   (wrapping)
//! z      = (z ^ (z >> 27)) * 0x94D049BB133111EB   (wrapping)
//! output = z ^ (z >> 31)
//! ```
//!
//! `below(n)` maps an output `x` to `(x * n) >> 64` computed in 128 bits, and
//! `unit()` is `(x >> 11) * 2^-53`.

use std::fmt;
use std::str::FromStr;

use crate::domain::{
    AssessmentEvent, OptionId, QuestionId, QuestionSpec, QuestionnaireSpec, StudentSession,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        ((u128::from(self.next_u64()) * u128::from(n)) >> 64) as u64
    }

    /// Uniform in `lo..=hi`.
    pub fn between(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BehaviorKind {
    /// Every question answered once, correctly, in order, in normal time.
    Assured,
    /// Every question answered once with a uniformly random option, fast.
    Guesser,
    /// Several markings per question, always ending on the correct option.
    SelfCorrector,
    /// Assured answers and timing, questions visited in shuffled order.
    Disordered,
}

impl BehaviorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BehaviorKind::Assured => "assured",
            BehaviorKind::Guesser => "guesser",
            BehaviorKind::SelfCorrector => "self-corrector",
            BehaviorKind::Disordered => "disordered",
        }
    }
}

impl fmt::Display for BehaviorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BehaviorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "assured" => Ok(BehaviorKind::Assured),
            "guesser" => Ok(BehaviorKind::Guesser),
            "self-corrector" | "self_corrector" | "selfcorrector" => Ok(BehaviorKind::SelfCorrector),
            "disordered" => Ok(BehaviorKind::Disordered),
            other => Err(Error::Simulation(format!("unknown profile {other:?}"))),
        }
    }
}

/// How many answer events each question receives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MarkingPlan {
    /// Drawn per question, inclusive.
    Range { min: u32, max: u32 },
    /// Fixed count for question `i` at index `i - 1`.
    PerQuestion(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileParams {
    /// Response time drawn in `(lo * t, hi * t]` for each question's `t`.
    pub time_fraction: (f64, f64),
    pub markings: MarkingPlan,
    /// Per-step swap probability of the visit-order shuffle; 1 is a full shuffle.
    pub shuffle_strength: f64,
}

impl ProfileParams {
    pub fn for_kind(kind: BehaviorKind) -> Self {
        let once = MarkingPlan::Range { min: 1, max: 1 };
        match kind {
            BehaviorKind::Assured => ProfileParams {
                time_fraction: (0.25, 1.0),
                markings: once,
                shuffle_strength: 0.0,
            },
            BehaviorKind::Guesser => ProfileParams {
                time_fraction: (0.0, 0.25),
                markings: once,
                shuffle_strength: 0.0,
            },
            BehaviorKind::SelfCorrector => ProfileParams {
                time_fraction: (0.25, 1.0),
                markings: MarkingPlan::Range { min: 2, max: 5 },
                shuffle_strength: 0.0,
            },
            BehaviorKind::Disordered => ProfileParams {
                time_fraction: (0.25, 1.0),
                markings: once,
                shuffle_strength: 1.0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorProfile {
    pub kind: BehaviorKind,
    pub seed: u64,
    pub params: ProfileParams,
}

impl BehaviorProfile {
    pub fn new(kind: BehaviorKind, seed: u64) -> Self {
        BehaviorProfile {
            kind,
            seed,
            params: ProfileParams::for_kind(kind),
        }
    }

    pub fn with_params(mut self, params: ProfileParams) -> Self {
        self.params = params;
        self
    }
}

const MAX_SHUFFLE_DRAWS: usize = 10_000;

/// Response-time bounds in ms for one question: `(lo * t, hi * t]`.
fn time_window(q: &QuestionSpec, (lo, hi): (f64, f64)) -> Result<(u64, u64)> {
    let t_ms = q.expected_time_ms() as f64;
    let lo_ms = (lo * t_ms).floor() as u64 + 1;
    let hi_ms = (hi * t_ms).floor() as u64;
    if !(lo >= 0.0 && hi > lo) || lo_ms > hi_ms {
        return Err(Error::Simulation(format!(
            "empty response-time window ({lo}, {hi}] for question {}",
            q.question_id
        )));
    }
    Ok((lo_ms, hi_ms))
}

fn is_monotone(order: &[QuestionId]) -> bool {
    order.windows(2).all(|w| w[0] <= w[1]) || order.windows(2).all(|w| w[0] > w[1])
}

fn visit_order(spec: &QuestionnaireSpec, strength: f64, rng: &mut SplitMix64) -> Result<Vec<QuestionId>> {
    let ascending: Vec<QuestionId> = spec.question_ids().collect();
    if strength <= 0.0 {
        return Ok(ascending);
    }
    let must_disorder = ascending.len() >= 3;
    for _ in 0..MAX_SHUFFLE_DRAWS {
        let mut order = ascending.clone();
        for i in (1..order.len()).rev() {
            if strength >= 1.0 || rng.unit() < strength {
                let j = rng.below(i as u64 + 1) as usize;
                order.swap(i, j);
            }
        }
        if !must_disorder || !is_monotone(&order) {
            return Ok(order);
        }
    }
    Err(Error::Simulation(format!(
        "no non-monotone visit order after {MAX_SHUFFLE_DRAWS} draws at strength {strength}"
    )))
}

fn random_wrong_option(q: &QuestionSpec, rng: &mut SplitMix64) -> OptionId {
    let wrong: Vec<OptionId> = q
        .options
        .iter()
        .filter(|o| !o.is_correct())
        .map(|o| o.option_id)
        .collect();
    if wrong.is_empty() {
        return q.correct_option().option_id;
    }
    wrong[rng.below(wrong.len() as u64) as usize]
}

/// Generates one session. Timestamps start at 0; each question is viewed,
/// answered over its response time, and the next view follows the last answer.
pub fn simulate_student(
    profile: &BehaviorProfile,
    spec: &QuestionnaireSpec,
    student_id: &str,
) -> Result<StudentSession> {
    let params = &profile.params;
    let windows = spec
        .questions
        .iter()
        .map(|q| time_window(q, params.time_fraction))
        .collect::<Result<Vec<_>>>()?;

    let worst_case_ms: u64 = windows.iter().map(|&(_, hi)| hi).sum();
    let budget_ms = (spec.max_total_time_s * 1000.0).floor() as u64;
    if worst_case_ms > budget_ms {
        return Err(Error::Simulation(format!(
            "response-time fractions need up to {} s but the questionnaire allows {} s",
            worst_case_ms as f64 / 1000.0,
            spec.max_total_time_s
        )));
    }

    if let MarkingPlan::PerQuestion(counts) = &params.markings {
        if counts.len() != spec.len() || counts.contains(&0) {
            return Err(Error::Simulation(format!(
                "marking plan must give a positive count for each of {} questions",
                spec.len()
            )));
        }
    }
    if let MarkingPlan::Range { min, max } = params.markings {
        if min == 0 || min > max {
            return Err(Error::Simulation(format!("invalid marking range {min}..={max}")));
        }
    }

    let mut rng = SplitMix64::new(profile.seed);
    let order = visit_order(spec, params.shuffle_strength, &mut rng)?;

    let mut events = Vec::new();
    let mut now = 0u64;
    for qid in order {
        let q = spec.question(qid).expect("visit order comes from the spec");
        let (lo, hi) = windows[qid.0 as usize - 1];
        let srt = rng.between(lo, hi);
        let markings = match &params.markings {
            MarkingPlan::Range { min, max } => rng.between(u64::from(*min), u64::from(*max)),
            MarkingPlan::PerQuestion(counts) => u64::from(counts[qid.0 as usize - 1]),
        };

        events.push(AssessmentEvent::view(student_id, qid, now));
        for j in 1..=markings {
            let at = now + srt * j / markings;
            let option = match profile.kind {
                BehaviorKind::Guesser => q.options[rng.below(q.options.len() as u64) as usize].option_id,
                _ if j < markings => random_wrong_option(q, &mut rng),
                _ => q.correct_option().option_id,
            };
            events.push(AssessmentEvent::answer(student_id, qid, option, at));
        }
        now += srt;
    }

    Ok(StudentSession::from_events(student_id, events))
}

/// `count` students of one profile; student `i` is `"{kind}-{i:04}"` and draws
/// its seed as the `i`-th output of a SplitMix64 stream seeded with `seed`.
pub fn simulate_class(
    kind: BehaviorKind,
    params: &ProfileParams,
    spec: &QuestionnaireSpec,
    count: usize,
    seed: u64,
) -> Result<Vec<StudentSession>> {
    let mut seeds = SplitMix64::new(seed);
    (0..count)
        .map(|i| {
            let profile = BehaviorProfile {
                kind,
                seed: seeds.next_u64(),
                params: params.clone(),
            };
            simulate_student(&profile, spec, &format!("{kind}-{i:04}"))
        })
        .collect()
}
