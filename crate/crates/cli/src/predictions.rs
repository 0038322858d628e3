use std::fs;
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::error::usage;

pub const PREDICTIONS_FILE: &str = "predictions.jsonl";

/// One line of a predictions file: `{id, output}` for single-sample methods,
/// `{id, samples}` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<String>>,
}

impl Prediction {
    pub fn new(id: String, mut outputs: Vec<String>) -> Self {
        if outputs.len() == 1 {
            Prediction { id, output: outputs.pop(), samples: None }
        } else {
            Prediction { id, output: None, samples: Some(outputs) }
        }
    }

    pub fn outputs(&self) -> Vec<String> {
        match (&self.samples, &self.output) {
            (Some(s), _) => s.clone(),
            (None, Some(o)) => vec![o.clone()],
            (None, None) => Vec::new(),
        }
    }
}

/// Strict reader: every non-blank line must be a prediction with an output.
pub fn read_predictions(path: &Path) -> anyhow::Result<Vec<Prediction>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let p: Prediction = serde_json::from_str(line)
            .map_err(|e| usage(format!("{} line {}: {e}", path.display(), i + 1)))?;
        if p.output.is_none() && p.samples.as_ref().is_none_or(|s| s.is_empty()) {
            return Err(usage(format!("{} line {}: no output or samples", path.display(), i + 1)));
        }
        out.push(p);
    }
    Ok(out)
}

/// Lenient reader for resuming: a line cut short by an interruption is skipped.
pub fn read_partial(path: &Path) -> anyhow::Result<Vec<Prediction>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .filter_map(|line| match serde_json::from_str::<Prediction>(line) {
            Ok(p) => Some(p),
            Err(_) => {
                if !line.trim().is_empty() {
                    log::warn!("ignoring unreadable prediction line in {}", path.display());
                }
                None
            }
        })
        .collect())
}
