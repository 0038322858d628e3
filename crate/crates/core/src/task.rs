use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The three formula domains of the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    ListOps,
    Arithmetic,
    Algebra,
}

impl TaskKind {
    pub const ALL: [TaskKind; 3] = [TaskKind::ListOps, TaskKind::Arithmetic, TaskKind::Algebra];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::ListOps => "listops",
            TaskKind::Arithmetic => "arithmetic",
            TaskKind::Algebra => "algebra",
        }
    }

    /// Column title used in summary tables.
    pub fn display_name(self) -> &'static str {
        match self {
            TaskKind::ListOps => "ListOps",
            TaskKind::Arithmetic => "Arithmetic",
            TaskKind::Algebra => "Algebra",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "listops" => Ok(TaskKind::ListOps),
            "arithmetic" => Ok(TaskKind::Arithmetic),
            "algebra" => Ok(TaskKind::Algebra),
            other => Err(Error::UnknownName { kind: "task", name: other.to_string() }),
        }
    }
}

/// Complexity parameters of a data split: maximum nesting depth and maximum
/// operand count of any operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SplitParams {
    pub nesting: u32,
    pub operands: u32,
}

impl SplitParams {
    pub const fn new(nesting: u32, operands: u32) -> Self {
        SplitParams { nesting, operands }
    }

    pub fn validate(self) -> Result<Self, Error> {
        if self.nesting < 1 || self.operands < 1 {
            return Err(Error::InvalidSplit { nesting: self.nesting, operands: self.operands });
        }
        Ok(self)
    }

    /// The nine test splits, N and O each ranging over {2, 3, 4}, in row-major order.
    pub fn benchmark_grid() -> Vec<SplitParams> {
        let mut out = Vec::with_capacity(9);
        for n in 2..=4 {
            for o in 2..=4 {
                out.push(SplitParams::new(n, o));
            }
        }
        out
    }

    /// Splits used for in-context exemplars.
    pub fn exemplar_splits() -> [SplitParams; 3] {
        [SplitParams::new(1, 2), SplitParams::new(2, 2), SplitParams::new(2, 3)]
    }

    /// Training mix of the toy router model.
    pub fn training_splits() -> [SplitParams; 4] {
        [
            SplitParams::new(1, 1),
            SplitParams::new(1, 2),
            SplitParams::new(2, 2),
            SplitParams::new(2, 3),
        ]
    }
}

impl fmt::Display for SplitParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={},O={}", self.nesting, self.operands)
    }
}
