use std::collections::BTreeMap;
use std::fs;

use anyhow::Context;
use nestbench_core::eval::Grid;
use nestbench_core::{AccuracyGrid, PromptMethod, TaskKind};
use serde::Serialize;

use crate::args::ReportArgs;
use crate::error::usage;
use crate::io::write_atomic;

use super::score::{ScoreReport, SCORE_FILE};

#[derive(Debug, Clone, Serialize)]
pub struct GridJson {
    pub nesting: Vec<u32>,
    pub operands: Vec<u32>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl From<&AccuracyGrid> for GridJson {
    fn from(g: &AccuracyGrid) -> Self {
        GridJson { nesting: g.rows.clone(), operands: g.cols.clone(), values: g.values.clone() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub model: String,
    pub task: TaskKind,
    pub method: String,
    pub correct: u64,
    pub total: u64,
    pub accuracy: f64,
    pub grid: GridJson,
    /// Per-split accuracy minus the baseline method's, when the baseline was scored.
    pub gain: Option<GridJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportOutcome {
    pub baseline: String,
    pub runs: Vec<RunSummary>,
}

/// Aggregate accuracy per task, in `TaskKind::ALL` order.
type TaskRow = [Option<f64>; 3];

/// Known methods in their canonical order, then other labels alphabetically.
fn method_rank(label: &str) -> (usize, String) {
    let known = PromptMethod::ALL.iter().position(|m| m.as_str() == label);
    (known.unwrap_or(PromptMethod::ALL.len()), label.to_string())
}

fn file_stem(model: &str, task: TaskKind, method: &str) -> String {
    let clean = |s: &str| -> String {
        s.chars().map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' }).collect()
    };
    let model = if model.is_empty() { "model".to_string() } else { clean(model) };
    format!("{model}__{task}__{}", clean(method))
}

pub fn report(args: &ReportArgs) -> anyhow::Result<ReportOutcome> {
    let mut scored: BTreeMap<(String, TaskKind, (usize, String)), ScoreReport> = BTreeMap::new();
    for dir in &args.runs {
        let path = dir.join(SCORE_FILE);
        let text = fs::read_to_string(&path)
            .map_err(|e| usage(format!("{} is not a scored run directory ({e})", dir.display())))?;
        let s: ScoreReport = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let key = (s.model.clone(), s.task, method_rank(&s.method));
        if scored.insert(key, s.clone()).is_some() {
            return Err(usage(format!("two runs for model `{}`, task {}, method {}", s.model, s.task, s.method)));
        }
    }

    let mut runs = Vec::new();
    for ((model, task, _), s) in &scored {
        let grid = s.matrix.accuracy_grid::<f64>();
        let baseline = scored.get(&(model.clone(), *task, method_rank(&args.baseline)));
        let gain = match baseline {
            Some(b) => Some(s.matrix.gain::<f64>(&b.matrix)?),
            None => {
                log::warn!("no {} baseline for model `{model}` on {task}; gain grid skipped", args.baseline);
                None
            }
        };
        let stem = file_stem(model, *task, &s.method);
        write_atomic(&args.out.join("grids").join(format!("{stem}.csv")), grid.to_csv(4).as_bytes())?;
        if let Some(g) = &gain {
            write_atomic(&args.out.join("gains").join(format!("{stem}.csv")), signed_csv(g).as_bytes())?;
        }
        runs.push(RunSummary {
            model: model.clone(),
            task: *task,
            method: s.method.clone(),
            correct: s.correct,
            total: s.total,
            accuracy: s.accuracy,
            grid: (&grid).into(),
            gain: gain.as_ref().map(GridJson::from),
        });
    }

    // model/method rows, task columns
    let mut rows: BTreeMap<(String, (usize, String)), TaskRow> = BTreeMap::new();
    for r in &runs {
        let col = TaskKind::ALL.iter().position(|t| *t == r.task).expect("known task");
        rows.entry((r.model.clone(), method_rank(&r.method))).or_default()[col] = Some(r.accuracy);
    }
    let mut table = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["model".to_string(), "method".to_string()];
    header.extend(TaskKind::ALL.iter().map(|t| t.display_name().to_string()));
    table.write_record(&header)?;
    for ((model, (_, method)), cols) in &rows {
        let mut rec = vec![model.clone(), method.clone()];
        rec.extend(cols.iter().map(|c| c.map(|v| format!("{v:.2}")).unwrap_or_default()));
        table.write_record(&rec)?;
    }
    write_atomic(&args.out.join("summary.csv"), &table.into_inner()?)?;

    let outcome = ReportOutcome { baseline: args.baseline.clone(), runs };
    let mut json = serde_json::to_string_pretty(&outcome)?;
    json.push('\n');
    write_atomic(&args.out.join("report.json"), json.as_bytes())?;
    Ok(outcome)
}

/// Gain grid CSV with explicit signs.
fn signed_csv(g: &Grid<f64>) -> String {
    let mut out = String::from("N\\O");
    for o in &g.cols {
        out.push_str(&format!(",O={o}"));
    }
    out.push('\n');
    for (r, n) in g.rows.iter().enumerate() {
        out.push_str(&format!("N={n}"));
        for v in &g.values[r] {
            match v {
                // avoid printing -0.0000
                Some(x) => out.push_str(&format!(",{:+.4}", if x.abs() < 5e-5 { 0.0 } else { *x })),
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}
