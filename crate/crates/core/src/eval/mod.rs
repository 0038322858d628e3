//! Turning raw model text into verdicts and per-split accuracy.

mod extract;
mod matrix;
mod vote;

pub use extract::{extract_answer, is_correct, normalize_int, ExtractionFailure};
pub use matrix::{judge, score_run, Cell, Grid, Judgment, SplitMatrix};
pub use vote::{expected_vote_accuracy, majority_vote};
