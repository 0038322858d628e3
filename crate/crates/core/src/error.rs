use thiserror::Error;

use crate::formula::ParseError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown {kind} name `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("invalid split N={nesting}, O={operands}: both must be at least 1")]
    InvalidSplit { nesting: u32, operands: u32 },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("formula violates {task} invariants: {reason}")]
    Invalid { task: &'static str, reason: String },

    #[error("irreducible operation `{node}`: {reason}")]
    Irreducible { node: String, reason: String },

    #[error("expected exactly two nonzero terms, found {0}")]
    NotBinomial(usize),

    #[error("unparseable answer `{0}`")]
    UnparseableAnswer(String),

    #[error("dataset line {line}: {source}")]
    Record { line: usize, source: serde_json::Error },

    #[error("cannot score run: {0}")]
    Scoring(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
