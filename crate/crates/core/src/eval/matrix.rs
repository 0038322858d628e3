use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::DatasetRecord;
use crate::error::Error;
use crate::eval::extract::{extract_answer, is_correct};
use crate::eval::vote::majority_vote;
use crate::prompt::PromptMethod;
use crate::scalar::Scalar;
use crate::task::{SplitParams, TaskKind};

/// Verdict for one record. `extracted` is parallel to `outputs`; `None`
/// marks an output with no recognizable answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub id: String,
    pub task: TaskKind,
    pub nesting: u32,
    pub operands: u32,
    pub gold: String,
    pub outputs: Vec<String>,
    pub extracted: Vec<Option<String>>,
    pub answer: Option<String>,
    pub correct: bool,
}

impl Judgment {
    pub fn split(&self) -> SplitParams {
        SplitParams::new(self.nesting, self.operands)
    }
}

/// Extracts an answer from every output and votes when there is more than one.
pub fn judge(record: &DatasetRecord, method: Option<PromptMethod>, outputs: Vec<String>) -> Judgment {
    let task = record.task;
    let extracted: Vec<Option<String>> = outputs.iter().map(|o| extract_answer(o, task, method).ok()).collect();
    let votes: Vec<String> = extracted.iter().flatten().cloned().collect();
    let answer = majority_vote(&votes, task);
    let correct = answer.as_deref().is_some_and(|a| is_correct(a, &record.target, task));
    Judgment {
        id: record.id.clone(),
        task,
        nesting: record.nesting,
        operands: record.operands,
        gold: record.target.clone(),
        outputs,
        extracted,
        answer,
        correct,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub nesting: u32,
    pub operands: u32,
    pub correct: u64,
    pub total: u64,
}

/// Correct/total counts per split for one (task, method) run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitMatrix {
    pub task: TaskKind,
    pub method: String,
    /// Sorted by (nesting, operands).
    pub cells: Vec<Cell>,
}

pub fn score_run(judgments: &[Judgment], method: &str) -> Result<SplitMatrix, Error> {
    let first = judgments.first().ok_or_else(|| Error::Scoring("no judgments".into()))?;
    let mut counts: BTreeMap<(u32, u32), (u64, u64)> = BTreeMap::new();
    for j in judgments {
        if j.task != first.task {
            return Err(Error::Scoring(format!("mixed tasks {} and {}", first.task, j.task)));
        }
        let c = counts.entry((j.nesting, j.operands)).or_default();
        c.0 += u64::from(j.correct);
        c.1 += 1;
    }
    Ok(SplitMatrix {
        task: first.task,
        method: method.to_string(),
        cells: counts
            .into_iter()
            .map(|((nesting, operands), (correct, total))| Cell { nesting, operands, correct, total })
            .collect(),
    })
}

/// Accuracy per split, laid out with nesting as rows and operands as columns.
/// Splits that were not evaluated are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    pub rows: Vec<u32>,
    pub cols: Vec<u32>,
    pub values: Vec<Vec<Option<T>>>,
}

impl<T: Scalar> Grid<T> {
    pub fn get(&self, nesting: u32, operands: u32) -> Option<T> {
        let r = self.rows.iter().position(|&n| n == nesting)?;
        let c = self.cols.iter().position(|&o| o == operands)?;
        self.values[r][c]
    }

    pub fn cells(&self) -> impl Iterator<Item = (u32, u32, T)> + '_ {
        self.rows.iter().enumerate().flat_map(move |(r, &n)| {
            self.cols.iter().enumerate().filter_map(move |(c, &o)| self.values[r][c].map(|v| (n, o, v)))
        })
    }

    /// CSV with a `N\O` corner, `N=n` row labels and `O=o` column labels.
    pub fn to_csv(&self, decimals: usize) -> String {
        let mut out = String::from("N\\O");
        for o in &self.cols {
            let _ = write!(out, ",O={o}");
        }
        out.push('\n');
        for (r, n) in self.rows.iter().enumerate() {
            let _ = write!(out, "N={n}");
            for v in &self.values[r] {
                match v.and_then(|v| v.to_f64()) {
                    Some(x) => {
                        let _ = write!(out, ",{x:.decimals$}");
                    }
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }
}

impl SplitMatrix {
    pub fn total(&self) -> u64 {
        self.cells.iter().map(|c| c.total).sum()
    }

    pub fn correct(&self) -> u64 {
        self.cells.iter().map(|c| c.correct).sum()
    }

    pub fn accuracy_grid<T: Scalar>(&self) -> Grid<T> {
        let mut rows: Vec<u32> = self.cells.iter().map(|c| c.nesting).collect();
        let mut cols: Vec<u32> = self.cells.iter().map(|c| c.operands).collect();
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        let mut values = vec![vec![None; cols.len()]; rows.len()];
        for c in self.cells.iter().filter(|c| c.total > 0) {
            let r = rows.binary_search(&c.nesting).expect("row present");
            let k = cols.binary_search(&c.operands).expect("column present");
            values[r][k] = Some(T::ratio(c.correct, c.total));
        }
        Grid { rows, cols, values }
    }

    /// Correct over total across all splits, so splits weigh by their size.
    pub fn aggregate<T: Scalar>(&self) -> Option<T> {
        let total = self.total();
        (total > 0).then(|| T::ratio(self.correct(), total))
    }

    /// Per-split accuracy difference `self - baseline`, defined where both runs have data.
    pub fn gain<T: Scalar>(&self, baseline: &SplitMatrix) -> Result<Grid<T>, Error> {
        if self.task != baseline.task {
            return Err(Error::Scoring(format!("gain across tasks {} and {}", self.task, baseline.task)));
        }
        let mine = self.accuracy_grid::<T>();
        let base = baseline.accuracy_grid::<T>();
        let values = mine
            .rows
            .iter()
            .map(|&n| {
                mine.cols
                    .iter()
                    .map(|&o| Some(mine.get(n, o)? - base.get(n, o)?))
                    .collect()
            })
            .collect();
        Ok(Grid { rows: mine.rows, cols: mine.cols, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn j(n: u32, o: u32, correct: bool) -> Judgment {
        Judgment {
            id: format!("{n}{o}"),
            task: TaskKind::ListOps,
            nesting: n,
            operands: o,
            gold: "1".into(),
            outputs: vec![],
            extracted: vec![],
            answer: None,
            correct,
        }
    }

    #[test]
    fn aggregate_weighs_by_count() {
        let js = vec![j(2, 2, true), j(2, 2, false), j(3, 2, true), j(3, 2, true), j(3, 2, true), j(3, 2, false)];
        let m = score_run(&js, "zero_shot").unwrap();
        assert_eq!(m.aggregate::<Ratio<i64>>(), Some(Ratio::new(4, 6)));
        let g = m.accuracy_grid::<Ratio<i64>>();
        assert_eq!(g.get(2, 2), Some(Ratio::new(1, 2)));
        assert_eq!(g.get(3, 2), Some(Ratio::new(3, 4)));
        assert_eq!(g.rows, vec![2, 3]);
        assert_eq!(m.accuracy_grid::<f64>().to_csv(4), "N\\O,O=2\nN=2,0.5000\nN=3,0.7500\n");
    }

    #[test]
    fn gain_is_cellwise_difference() {
        let a = score_run(&[j(2, 2, true), j(2, 3, true)], "few_shot").unwrap();
        let b = score_run(&[j(2, 2, false), j(2, 3, true)], "zero_shot").unwrap();
        let g = a.gain::<f64>(&b).unwrap();
        assert_eq!(g.get(2, 2), Some(1.0));
        assert_eq!(g.get(2, 3), Some(0.0));
        assert_eq!(a.gain::<f64>(&a).unwrap().cells().map(|c| c.2).sum::<f64>(), 0.0);
    }

    #[test]
    fn judge_votes_over_samples() {
        let rec = DatasetRecord {
            id: "r".into(),
            task: TaskKind::Arithmetic,
            nesting: 2,
            operands: 2,
            seed: 0,
            formula: "((1+2)*3)".into(),
            target: "9".into(),
            trace: vec![],
        };
        let outs = ["9", "8", "9", "no", "nine"].iter().map(|s| format!("So, the final answer is: {s}")).collect();
        let jd = judge(&rec, Some(PromptMethod::SelfConsistency), outs);
        assert_eq!(jd.answer.as_deref(), Some("9"));
        assert!(jd.correct);
        assert_eq!(jd.extracted.iter().filter(|e| e.is_none()).count(), 2);
        assert!(score_run(&[], "x").is_err());
    }
}
