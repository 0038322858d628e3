//! Message sequences for the seven prompting methods.
//!
//! Worked exemplars default to the reference fixtures. Every template is a
//! fixed string, so a bundle is a pure function of (task, method, record, options).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::DatasetRecord;
use crate::error::Error;
use crate::generator::{fixture_exemplars, fixture_record, generated_exemplar, ExemplarSource};
use crate::oracle::SolutionTrace;
use crate::task::{SplitParams, TaskKind};
use crate::verbal::{symbolic, verbalize_with, PhrasePlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptMethod {
    ZeroShot,
    ZeroShotRole,
    FewShot,
    SymbolicCot,
    VerbalCot,
    ZeroShotCot,
    SelfConsistency,
}

impl PromptMethod {
    pub const ALL: [PromptMethod; 7] = [
        PromptMethod::ZeroShot,
        PromptMethod::ZeroShotRole,
        PromptMethod::FewShot,
        PromptMethod::SymbolicCot,
        PromptMethod::VerbalCot,
        PromptMethod::ZeroShotCot,
        PromptMethod::SelfConsistency,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PromptMethod::ZeroShot => "zero_shot",
            PromptMethod::ZeroShotRole => "zero_shot_role",
            PromptMethod::FewShot => "few_shot",
            PromptMethod::SymbolicCot => "symbolic_cot",
            PromptMethod::VerbalCot => "verbal_cot",
            PromptMethod::ZeroShotCot => "zero_shot_cot",
            PromptMethod::SelfConsistency => "self_consistency",
        }
    }

    /// Row label in summary tables.
    pub fn display_name(self) -> &'static str {
        match self {
            PromptMethod::ZeroShot => "Zero-shot",
            PromptMethod::ZeroShotRole => "Zero-shot role",
            PromptMethod::FewShot => "Few-shot",
            PromptMethod::SymbolicCot => "Symbolic CoT",
            PromptMethod::VerbalCot => "Verbal CoT",
            PromptMethod::ZeroShotCot => "Zero-shot CoT",
            PromptMethod::SelfConsistency => "Self-consistency",
        }
    }

    /// Methods that send a second turn asking for the final answer.
    pub fn is_two_stage(self) -> bool {
        matches!(self, PromptMethod::ZeroShotCot | PromptMethod::SelfConsistency)
    }
}

impl fmt::Display for PromptMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PromptMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        PromptMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == norm)
            .ok_or_else(|| Error::UnknownName { kind: "method", name: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::Assistant, content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub messages: Vec<ChatMessage>,
    /// Second-stage user turn, sent after the model's first reply.
    pub followup: Option<String>,
    pub samples_required: u32,
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PromptOptions {
    pub exemplars: ExemplarSource,
    pub self_consistency_samples: u32,
    pub greedy_temperature: f64,
    pub sampling_temperature: f64,
}

impl Default for PromptOptions {
    fn default() -> Self {
        PromptOptions {
            exemplars: ExemplarSource::Fixture,
            self_consistency_samples: 5,
            greedy_temperature: 0.0,
            sampling_temperature: 0.7,
        }
    }
}

pub const ROLE_SENTENCE: &str = "You are a brilliant mathematician";
pub const STEP_BY_STEP: &str = "Let's think step-by-step.";
pub const FINAL_ANSWER_FOLLOWUP: &str = "So, the final answer is:";

/// Audit line for prompt dumps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptDump {
    pub id: String,
    pub method: PromptMethod,
    pub messages: Vec<ChatMessage>,
    pub followup: Option<String>,
}

/// Text the answer extractor anchors on for `(task, method)`.
pub fn answer_cue(task: TaskKind, method: PromptMethod) -> &'static str {
    match method {
        PromptMethod::ZeroShot | PromptMethod::ZeroShotRole => match task {
            TaskKind::ListOps => "The final result is (arabic numeral):",
            TaskKind::Arithmetic => "The final result is (arabic numerals):",
            TaskKind::Algebra => "The final result is (algebraic expression):",
        },
        PromptMethod::FewShot | PromptMethod::SymbolicCot => "=",
        PromptMethod::VerbalCot => "final result",
        PromptMethod::ZeroShotCot | PromptMethod::SelfConsistency => FINAL_ANSWER_FOLLOWUP,
    }
}

#[derive(Clone, Copy)]
enum Wording {
    /// Zero-shot family.
    Direct,
    /// Exemplar-based prompts.
    Worked,
}

fn question(task: TaskKind, wording: Wording, formula: &str) -> String {
    match (task, wording) {
        (TaskKind::ListOps, _) => format!(
            "Q: MIN, MAX and SM are operators on lists of single-digit integers which have the semantics of minimum, \
             maximum and sum modulo 10, respectively. Solve the following expression involving these operators:\n{formula}."
        ),
        (TaskKind::Arithmetic, Wording::Direct) => format!(
            "Q: Solve the following arithmetic expression computing the modulo 100 of each intermediate value if it's \
             positive, and the modulo -100 if it's negative:\n{formula}."
        ),
        (TaskKind::Arithmetic, Wording::Worked) => format!(
            "Q: Solve the following arithmetic expression taking each intermediate value modulo 100 if it's positive, \
             and modulo -100 if it's negative: {formula}."
        ),
        (TaskKind::Algebra, Wording::Direct) => format!(
            "Q: Simplify the following algebraic expression, computing the modulo 100 of the numerical coefficient of \
             each intermediate value if it's positive, and the modulo -100 if it's negative:\n{formula}.\n\
             If possible, factor by grouping the final result."
        ),
        (TaskKind::Algebra, Wording::Worked) => format!(
            "Q: Solve the following algebraic expression taking the numerical coefficient of each intermediate value \
             modulo 100 if it's positive, and modulo -100 if it's negative:\n{formula}.\n\
             If possible, factor by grouping the final result."
        ),
    }
}

/// Reference chain-of-thought exemplars: formula plus, for verbal ones, the
/// phrase plan that reproduces the reference wording.
fn cot_fixtures(task: TaskKind, method: PromptMethod) -> Vec<(&'static str, PhrasePlan)> {
    let plan = |opening, steps: &[usize], closing| PhrasePlan { opening, steps: steps.to_vec(), closing };
    let none = || plan(0, &[], 0);
    match (task, method) {
        (TaskKind::ListOps, PromptMethod::SymbolicCot) => {
            vec![("[SM73]", none()), ("[SM[SM86]1]", none()), ("[MIN[MAX243]4[MAX937]]", none())]
        }
        (TaskKind::Arithmetic, PromptMethod::SymbolicCot) => vec![
            ("(-16*-37)", none()),
            ("((87*-51)-(47*-6))", none()),
            ("((-12--28-74)+-21+(76+-32+-87))", none()),
        ],
        (TaskKind::Algebra, PromptMethod::SymbolicCot) => vec![
            ("(+39*a*b*y++15*a*b*x*y)", none()),
            ("(+21*x*y+(-26*x*y+-92*x*y))", none()),
            ("((+45*b*x++22*b*x+-47*b*x)+-62*b*x*y)", none()),
        ],
        (TaskKind::ListOps, PromptMethod::VerbalCot) => vec![
            ("[MIN82]", plan(0, &[], 0)),
            ("[MIN[SM56][MAX87]]", plan(0, &[0, 1], 1)),
            ("[MIN[MIN326]0[SM851]]", plan(1, &[2, 3], 1)),
        ],
        (TaskKind::Arithmetic, PromptMethod::VerbalCot) => vec![
            ("(-14*88)", plan(1, &[], 0)),
            ("((92*26)*(-35*59))", plan(1, &[1, 3], 0)),
            ("(83-(46+-5-54)-25)", plan(2, &[4], 2)),
        ],
        (TaskKind::Algebra, PromptMethod::VerbalCot) => vec![
            ("(+10*a*b*x*y+-23*a*b*x)", plan(3, &[], 0)),
            ("(-8*a*x*y+(-38*a*x+-70*a*x))", plan(1, &[2], 1)),
            ("(+31*a*b*y+(-50*a*b*x+-64*a*b*x+-46*a*b*x))", plan(2, &[4], 2)),
        ],
        _ => fixture_exemplars(task).into_iter().map(|f| (f, none())).collect(),
    }
}

/// Solved exemplars for a method, never containing the query formula.
fn exemplars(
    task: TaskKind,
    method: PromptMethod,
    query: &str,
    source: ExemplarSource,
) -> Result<Vec<(DatasetRecord, PhrasePlan)>, Error> {
    let fixtures = cot_fixtures(task, method);
    let splits = SplitParams::exemplar_splits();
    let mut out = Vec::with_capacity(3);
    for (i, (formula, plan)) in fixtures.into_iter().enumerate() {
        let fixture = fixture_record(task, formula, format!("{task}-{method}-fixture-{i}"))?;
        if source == ExemplarSource::Fixture && fixture.formula != query {
            out.push((fixture, plan));
            continue;
        }
        let generated = generated_exemplar(task, splits[i], query)?;
        let trace_len = generated.trace.len();
        let plan = PhrasePlan::seeded(&generated.id, trace_len.saturating_sub(2));
        out.push((generated, plan));
    }
    Ok(out)
}

fn worked_answer(method: PromptMethod, record: &DatasetRecord, plan: &PhrasePlan) -> String {
    let trace = SolutionTrace { steps: record.trace.clone() };
    match method {
        PromptMethod::SymbolicCot => symbolic(&trace),
        PromptMethod::VerbalCot => verbalize_with(&trace, plan),
        _ => format!("{}={}.", record.formula, record.target),
    }
}

pub fn build_prompt(task: TaskKind, method: PromptMethod, record: &DatasetRecord) -> Result<PromptBundle, Error> {
    build_prompt_with(task, method, record, &PromptOptions::default())
}

pub fn build_prompt_with(
    task: TaskKind,
    method: PromptMethod,
    record: &DatasetRecord,
    opts: &PromptOptions,
) -> Result<PromptBundle, Error> {
    if record.task != task {
        return Err(Error::Invalid { task: task.as_str(), reason: format!("record {} belongs to {}", record.id, record.task) });
    }
    let query = record.formula.as_str();
    let mut bundle = PromptBundle {
        messages: Vec::new(),
        followup: None,
        samples_required: 1,
        temperature: opts.greedy_temperature,
    };
    match method {
        PromptMethod::ZeroShot | PromptMethod::ZeroShotRole => {
            if method == PromptMethod::ZeroShotRole {
                bundle.messages.push(ChatMessage::system(ROLE_SENTENCE));
            }
            let text = format!("{}\n\nA: {}", question(task, Wording::Direct, query), answer_cue(task, method));
            bundle.messages.push(ChatMessage::user(text));
        }
        PromptMethod::FewShot | PromptMethod::SymbolicCot | PromptMethod::VerbalCot => {
            let mut blocks: Vec<String> = exemplars(task, method, query, opts.exemplars)?
                .iter()
                .map(|(r, plan)| {
                    format!("{}\n\nA: {}", question(task, Wording::Worked, &r.formula), worked_answer(method, r, plan))
                })
                .collect();
            blocks.push(question(task, Wording::Worked, query));
            bundle.messages.push(ChatMessage::user(blocks.join("\n\n")));
        }
        PromptMethod::ZeroShotCot | PromptMethod::SelfConsistency => {
            let text = format!("{}\n\nA: {STEP_BY_STEP}", question(task, Wording::Direct, query));
            bundle.messages.push(ChatMessage::user(text));
            bundle.followup = Some(FINAL_ANSWER_FOLLOWUP.to_string());
            if method == PromptMethod::SelfConsistency {
                bundle.samples_required = opts.self_consistency_samples.max(1);
                bundle.temperature = opts.sampling_temperature;
            }
        }
    }
    Ok(bundle)
}
