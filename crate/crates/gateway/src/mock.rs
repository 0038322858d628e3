//! Offline providers that read the query out of the prompt and answer it.

use nestbench_core::formula::parse;
use nestbench_core::oracle::{evaluate, SolutionTrace};
use nestbench_core::prompt::{Role, FINAL_ANSWER_FOLLOWUP};
use nestbench_core::seed::rng_for;
use nestbench_core::verbal::{symbolic, verbalize, TraceStyle};
use nestbench_core::TaskKind;
use rand::Rng;

use crate::error::GatewayError;
use crate::provider::Provider;
use crate::request::ChatRequest;

/// Number of distinct wrong answers the noisy mock chooses from.
pub const WRONG_POOL: usize = 4;

fn detect_task(prompt: &str) -> Option<TaskKind> {
    if prompt.contains("MIN, MAX and SM") {
        Some(TaskKind::ListOps)
    } else if prompt.contains("algebraic expression") {
        Some(TaskKind::Algebra)
    } else if prompt.contains("arithmetic expression") {
        Some(TaskKind::Arithmetic)
    } else {
        None
    }
}

/// Balanced bracket span starting at the first `(` or `[` after the last `Q:`.
fn query_formula(prompt: &str) -> Option<&str> {
    let tail = &prompt[prompt.rfind("Q:")?..];
    let start = tail.find(['(', '['])?;
    let mut depth = 0usize;
    for (i, c) in tail[start..].char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&tail[start..=start + i]);
                }
            }
            _ => {}
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Style {
    /// Reasoning turn of a two-stage prompt.
    Reasoning,
    /// Bare answer after a cue.
    Bare,
    Verbal,
    Symbolic,
    Equation,
}

struct Parsed {
    task: TaskKind,
    formula: String,
    trace: SolutionTrace,
    style: Style,
}

fn understand(req: &ChatRequest) -> Result<Parsed, GatewayError> {
    let first = req
        .messages
        .iter()
        .find(|m| m.role == Role::User)
        .ok_or_else(|| GatewayError::Rejected { status: 400, body: "no user message".into() })?;
    let prompt = first.content.as_str();
    let bad = |why: &str| GatewayError::Rejected { status: 400, body: why.to_string() };
    let task = detect_task(prompt).ok_or_else(|| bad("unrecognized task"))?;
    let formula = query_formula(prompt).ok_or_else(|| bad("no query formula"))?;
    let parsed = parse(formula, task).map_err(|e| bad(&e.to_string()))?;
    let trace = evaluate(&parsed, task).map_err(|e| bad(&e.to_string()))?;
    let last = req.last_user_message().unwrap_or_default().trim_end();
    let style = if last == FINAL_ANSWER_FOLLOWUP && req.messages.len() > 1 {
        Style::Bare
    } else if last.ends_with("step-by-step.") {
        Style::Reasoning
    } else if last.ends_with(':') {
        Style::Bare
    } else if prompt.contains("to the final result") {
        Style::Verbal
    } else if prompt.contains("=\n") {
        Style::Symbolic
    } else {
        Style::Equation
    };
    Ok(Parsed { task, formula: formula.to_string(), trace, style })
}

fn respond(p: &Parsed, answer: &str, key: &str) -> String {
    let mut trace = p.trace.clone();
    if let Some(last) = trace.steps.last_mut() {
        *last = answer.to_string();
    }
    match p.style {
        Style::Bare => format!(" {answer}"),
        Style::Reasoning => verbalize(&trace, TraceStyle::Verbal, key),
        Style::Verbal => format!("A: {}", verbalize(&trace, TraceStyle::Verbal, key)),
        Style::Symbolic => format!("A: {}", symbolic(&trace)),
        Style::Equation => format!("A: {}={answer}.", p.formula),
    }
}

/// Always answers correctly, in the format the prompt asks for.
#[derive(Debug, Default, Clone, Copy)]
pub struct OracleMock;

impl Provider for OracleMock {
    fn id(&self) -> String {
        "mock-oracle".into()
    }

    fn complete(&self, req: &ChatRequest) -> Result<String, GatewayError> {
        let p = understand(req)?;
        Ok(respond(&p, p.trace.final_answer(), &req.cache_key()))
    }
}

/// Answers correctly except with probability `error_rate` per answering call,
/// when it gives one of [`WRONG_POOL`] distinct wrong answers uniformly. The
/// draw depends only on the seed and the request, so replays are identical.
/// Reasoning turns of two-stage prompts are never corrupted.
#[derive(Debug, Clone, Copy)]
pub struct NoisyMock {
    pub error_rate: f64,
    pub seed: u64,
}

/// The `k`-th wrong answer (`1..=WRONG_POOL`) for a gold answer.
pub fn wrong_answer(task: TaskKind, gold: &str, k: usize) -> String {
    match task {
        TaskKind::ListOps => {
            let g: i64 = gold.parse().unwrap_or(0);
            ((g + k as i64).rem_euclid(10)).to_string()
        }
        TaskKind::Arithmetic => {
            let g: i64 = gold.parse().unwrap_or(0);
            (g + 10 * k as i64).to_string()
        }
        TaskKind::Algebra => k.to_string(),
    }
}

impl Provider for NoisyMock {
    fn id(&self) -> String {
        format!("mock-noisy-{}-{}", self.error_rate, self.seed)
    }

    fn complete(&self, req: &ChatRequest) -> Result<String, GatewayError> {
        let p = understand(req)?;
        let key = req.cache_key();
        let gold = p.trace.final_answer();
        if p.style == Style::Reasoning {
            return Ok(respond(&p, gold, &key));
        }
        let mut rng = rng_for(&["noisy-mock", &self.seed.to_string(), &key]);
        let answer = if rng.random_bool(self.error_rate.clamp(0.0, 1.0)) {
            wrong_answer(p.task, gold, rng.random_range(1..=WRONG_POOL))
        } else {
            gold.to_string()
        };
        Ok(respond(&p, &answer, &key))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nestbench_core::prompt::ChatMessage;

    #[test]
    fn finds_the_last_query() {
        let prompt = "Q: a (1+2).\n\nA: (1+2)=3.\n\nQ: b ((3*4)-5).";
        assert_eq!(query_formula(prompt), Some("((3*4)-5)"));
        assert_eq!(query_formula("Q: [MIN[MAX12]3]."), Some("[MIN[MAX12]3]"));
        assert_eq!(query_formula("nothing"), None);
    }

    #[test]
    fn wrong_answers_are_distinct_and_wrong() {
        for task in TaskKind::ALL {
            let gold = if task == TaskKind::Algebra { "-17*x*y" } else { "7" };
            let mut seen: Vec<String> = (1..=WRONG_POOL).map(|k| wrong_answer(task, gold, k)).collect();
            assert!(!seen.iter().any(|w| w == gold));
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), WRONG_POOL);
        }
    }

    #[test]
    fn unknown_prompt_is_rejected() {
        let req = ChatRequest {
            model: "m".into(),
            messages: vec![ChatMessage::user("hello")],
            temperature: 0.0,
            sample_index: 0,
            max_output_tokens: 8,
        };
        assert!(OracleMock.complete(&req).is_err());
    }
}
