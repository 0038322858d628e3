use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::BufReader;

use anyhow::Context;
use nestbench_core::dataset::read_jsonl;
use nestbench_core::eval::{judge, score_run, SplitMatrix};
use nestbench_core::{PromptMethod, TaskKind};
use serde::{Deserialize, Serialize};

use crate::args::ScoreArgs;
use crate::error::usage;
use crate::io::{jsonl_bytes, write_atomic};
use crate::manifest::RunManifest;
use crate::predictions::read_predictions;

pub const SCORE_FILE: &str = "score.json";
pub const JUDGMENTS_FILE: &str = "judgments.jsonl";
pub const GRID_FILE: &str = "grid.csv";
pub const SUMMARY_FILE: &str = "summary.csv";

/// Contents of `score.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub task: TaskKind,
    pub method: String,
    pub model: String,
    pub correct: u64,
    pub total: u64,
    /// Correct over total across every split, as a fraction in [0, 1].
    pub accuracy: f64,
    pub matrix: SplitMatrix,
}

fn listing(ids: &[&str]) -> String {
    const SHOWN: usize = 20;
    let mut s = ids.iter().take(SHOWN).copied().collect::<Vec<_>>().join(", ");
    if ids.len() > SHOWN {
        s.push_str(&format!(", ... ({} total)", ids.len()));
    }
    s
}

pub fn score(args: &ScoreArgs) -> anyhow::Result<ScoreReport> {
    let gold_file = fs::File::open(&args.gold).with_context(|| format!("opening {}", args.gold.display()))?;
    let gold = read_jsonl(BufReader::new(gold_file)).map_err(|e| usage(format!("{}: {e}", args.gold.display())))?;
    if gold.is_empty() {
        return Err(usage(format!("gold file {} is empty", args.gold.display())));
    }
    let task = gold[0].task;
    if let Some(r) = gold.iter().find(|r| r.task != task) {
        return Err(usage(format!("gold file mixes tasks {task} and {}", r.task)));
    }
    let preds = read_predictions(&args.pred)?;

    let gold_ids: HashSet<&str> = gold.iter().map(|r| r.id.as_str()).collect();
    let mut by_id: HashMap<&str, &crate::predictions::Prediction> = HashMap::new();
    let mut duplicates = Vec::new();
    for p in &preds {
        if by_id.insert(p.id.as_str(), p).is_some() {
            duplicates.push(p.id.as_str());
        }
    }
    let unknown: Vec<&str> = preds.iter().map(|p| p.id.as_str()).filter(|id| !gold_ids.contains(id)).collect();
    let missing: Vec<&str> = gold.iter().map(|r| r.id.as_str()).filter(|id| !by_id.contains_key(id)).collect();
    let mut problems = Vec::new();
    if !unknown.is_empty() {
        problems.push(format!("predictions for ids not in gold: {}", listing(&unknown)));
    }
    if !missing.is_empty() {
        problems.push(format!("gold ids without predictions: {}", listing(&missing)));
    }
    if !duplicates.is_empty() {
        problems.push(format!("duplicate prediction ids: {}", listing(&duplicates)));
    }
    if !problems.is_empty() {
        return Err(usage(problems.join("\n")));
    }

    let manifest = match args.pred.parent() {
        Some(dir) => RunManifest::load(dir).ok().flatten(),
        None => None,
    };
    let method_label = args
        .method
        .clone()
        .or_else(|| manifest.as_ref().map(|m| m.method.to_string()))
        .unwrap_or_else(|| "unknown".into());
    let model = args.model.clone().or_else(|| manifest.as_ref().map(|m| m.model.clone())).unwrap_or_default();
    let method: Option<PromptMethod> = method_label.parse().ok();

    let judgments: Vec<_> = gold.iter().map(|r| judge(r, method, by_id[r.id.as_str()].outputs())).collect();
    let matrix = score_run(&judgments, &method_label)?;
    let report = ScoreReport {
        task,
        method: method_label,
        model,
        correct: matrix.correct(),
        total: matrix.total(),
        accuracy: matrix.aggregate::<f64>().unwrap_or(0.0),
        matrix,
    };

    write_atomic(&args.out.join(JUDGMENTS_FILE), &jsonl_bytes(&judgments)?)?;
    write_atomic(&args.out.join(GRID_FILE), report.matrix.accuracy_grid::<f64>().to_csv(4).as_bytes())?;
    let mut summary = csv::Writer::from_writer(Vec::new());
    summary.write_record(["task", "method", "model", "correct", "total", "accuracy"])?;
    summary.write_record([
        task.as_str(),
        &report.method,
        &report.model,
        &report.correct.to_string(),
        &report.total.to_string(),
        &format!("{:.2}", report.accuracy),
    ])?;
    write_atomic(&args.out.join(SUMMARY_FILE), &summary.into_inner()?)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write_atomic(&args.out.join(SCORE_FILE), json.as_bytes())?;
    Ok(report)
}
