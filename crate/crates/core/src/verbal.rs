//! Renders solution traces as chain-of-thought text.
//!
//! Verbal phrases come from a closed pool; each carries its own trailing
//! punctuation, which is part of the template.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::oracle::SolutionTrace;
use crate::seed::rng_for;

pub const OPENINGS: [&str; 4] = [
    "Let's solve the following expression: {}.",
    "Let us recall the expression to be solved: {}.",
    "We need to solve the following expression: {}.",
    "The expression we need to solve is: {}.",
];

pub const STEPS: [&str; 5] = [
    "Simplifying an expression without nested parentheses, we get: {}.",
    "Simplifying the expression, it becomes: {}",
    "By solving a simple expression, we obtain: {}.",
    "Solving a expression within a single pair of brackets, we get: {}.",
    "Taking an immediate solution step, we obtain: {}.",
];

pub const CLOSINGS: [&str; 3] = [
    "Simplifying the expression, we get to the final result: {}",
    "Taking an immediate solution step, we get to the final result: {}.",
    "As this expression is in a simple form, we can get to the final result: {}",
];

/// Closings used when the final answer is a factored binomial.
pub const FACTORED_CLOSINGS: [&str; 3] = [
    "Simplifying the expression and factoring by grouping, we get to the final result: {}",
    "As this expression is in a simple form, we can get to the final result factoring by grouping: {}",
    "Taking an immediate solution step and factoring by grouping, we get to the final result: {}.",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceStyle {
    Symbolic,
    Verbal,
}

/// Phrase indices for one verbal rendering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhrasePlan {
    pub opening: usize,
    pub steps: Vec<usize>,
    pub closing: usize,
}

impl PhrasePlan {
    /// Draws a plan for `step_count` intermediate lines, seeded by `key`.
    pub fn seeded(key: &str, step_count: usize) -> Self {
        let mut rng = rng_for(&["verbal", key]);
        PhrasePlan {
            opening: rng.random_range(0..OPENINGS.len()),
            steps: (0..step_count).map(|_| rng.random_range(0..STEPS.len())).collect(),
            closing: rng.random_range(0..CLOSINGS.len()),
        }
    }
}

fn fill(template: &str, value: &str) -> String {
    template.replacen("{}", value, 1)
}

/// Renders a trace. A trace without reduction steps renders as its only line.
pub fn verbalize(trace: &SolutionTrace, style: TraceStyle, key: &str) -> String {
    match style {
        TraceStyle::Symbolic => symbolic(trace),
        TraceStyle::Verbal => {
            let plan = PhrasePlan::seeded(key, trace.steps.len().saturating_sub(2));
            verbalize_with(trace, &plan)
        }
    }
}

pub fn symbolic(trace: &SolutionTrace) -> String {
    if trace.steps.len() < 2 {
        return trace.final_answer().to_string();
    }
    format!("{}.", trace.steps.join("=\n"))
}

pub fn verbalize_with(trace: &SolutionTrace, plan: &PhrasePlan) -> String {
    let n = trace.steps.len();
    if n < 2 {
        return trace.final_answer().to_string();
    }
    let mut lines = Vec::with_capacity(n);
    lines.push(fill(OPENINGS[plan.opening % OPENINGS.len()], &trace.steps[0]));
    for (i, step) in trace.steps[1..n - 1].iter().enumerate() {
        let idx = plan.steps.get(i).copied().unwrap_or(0);
        lines.push(fill(STEPS[idx % STEPS.len()], step));
    }
    let last = trace.final_answer();
    let closings = if last.contains('(') { &FACTORED_CLOSINGS } else { &CLOSINGS };
    lines.push(fill(closings[plan.closing % closings.len()], last));
    lines.join("\n")
}
