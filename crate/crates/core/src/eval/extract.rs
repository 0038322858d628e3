use std::sync::LazyLock;

use regex::Regex;
use thiserror::Error;

use crate::algebra::{equivalent, longest_answer_prefix};
use crate::prompt::{answer_cue, PromptMethod};
use crate::task::TaskKind;

static SIGNED_INT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[+-]?[0-9]+").expect("valid regex"));

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no {task} answer found in model output")]
pub struct ExtractionFailure {
    pub task: TaskKind,
}

fn starts_answer(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_digit() || "+-([abxy".contains(c))
}

/// Pulls the answer out of raw model text.
///
/// Text after the last occurrence of the method's cue is kept (the whole
/// text when the cue is absent, or when no method is known). A leading label
/// ending in `:` is dropped, then surrounding whitespace and one trailing
/// period. Integer tasks take the first signed integer; algebra takes the
/// longest prefix that parses as an answer.
pub fn extract_answer(raw: &str, task: TaskKind, method: Option<PromptMethod>) -> Result<String, ExtractionFailure> {
    let text = raw.replace('\u{2212}', "-");
    let mut rest = text.as_str();
    if let Some(cue) = method.map(|m| answer_cue(task, m)) {
        if let Some(i) = rest.rfind(cue) {
            rest = &rest[i + cue.len()..];
        }
    }
    let mut rest = rest.trim();
    if !starts_answer(rest) {
        if let Some(i) = rest.find(':') {
            rest = rest[i + 1..].trim();
        }
    }
    let rest = rest.strip_suffix('.').unwrap_or(rest).trim_end();
    let found = match task {
        TaskKind::ListOps | TaskKind::Arithmetic => SIGNED_INT.find(rest).map(|m| m.as_str().to_string()),
        TaskKind::Algebra => longest_answer_prefix(rest).map(str::to_string),
    };
    found.ok_or(ExtractionFailure { task })
}

/// Canonical decimal form: no `+`, no leading zeros, `-0` becomes `0`.
pub fn normalize_int(s: &str) -> Option<i64> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    s.parse::<i64>().ok()
}

/// Exact match for integer tasks (after normalization), semantic equivalence for algebra.
pub fn is_correct(answer: &str, gold: &str, task: TaskKind) -> bool {
    match task {
        TaskKind::ListOps | TaskKind::Arithmetic => match (normalize_int(answer), normalize_int(gold)) {
            (Some(a), Some(g)) => a == g,
            _ => false,
        },
        TaskKind::Algebra => equivalent(answer, gold),
    }
}
