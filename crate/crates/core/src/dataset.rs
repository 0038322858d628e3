//! Benchmark records and their line-delimited JSON file format.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::formula::{parse, Formula, ParseError};
use crate::oracle::evaluate;
use crate::task::{SplitParams, TaskKind};

/// One benchmark instance. Field order is the on-disk key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub task: TaskKind,
    pub nesting: u32,
    pub operands: u32,
    pub seed: u64,
    pub formula: String,
    pub target: String,
    pub trace: Vec<String>,
}

impl DatasetRecord {
    /// Builds a record by running the oracle on `formula`.
    pub fn solve(id: String, task: TaskKind, split: SplitParams, seed: u64, formula: &Formula) -> Result<Self, Error> {
        let trace = evaluate(formula, task)?;
        Ok(DatasetRecord {
            id,
            task,
            nesting: split.nesting,
            operands: split.operands,
            seed,
            formula: trace.steps[0].clone(),
            target: trace.final_answer().to_string(),
            trace: trace.steps,
        })
    }

    pub fn split(&self) -> SplitParams {
        SplitParams::new(self.nesting, self.operands)
    }

    pub fn parse_formula(&self) -> Result<Formula, ParseError> {
        parse(&self.formula, self.task)
    }
}

/// Writes one JSON object per line, `\n` terminated.
pub fn write_jsonl<W: Write>(mut out: W, records: &[DatasetRecord]) -> Result<(), Error> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads records, skipping blank lines.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<DatasetRecord>, Error> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| Error::Record { line: i + 1, source })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate_dataset, GenSpec};

    #[test]
    fn jsonl_round_trip_and_layout() {
        let spec = GenSpec { task: TaskKind::Arithmetic, split: SplitParams::new(2, 2), count: 5, seed: 7 };
        let records = generate_dataset(&spec).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.ends_with('\n'));
        assert!(text.starts_with("{\"id\":\"arithmetic-2-2-0\",\"task\":\"arithmetic\",\"nesting\":2,\"operands\":2,\"seed\":7,\"formula\":"));
        assert_eq!(read_jsonl(buf.as_slice()).unwrap(), records);
    }

    #[test]
    fn bad_line_reports_its_number() {
        let err = read_jsonl("\n{}\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Record { line: 2, .. }));
    }
}
