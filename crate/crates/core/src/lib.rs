//! Synthetic nested-formula benchmarks for probing step-by-step reasoning.
//!
//! Three tasks are covered: ListOps over digit lists, integer arithmetic
//! with a two-digit modulo, and algebraic monomials. Each formula has a
//! nesting depth `N` and an operand count `O`. The [`oracle`] reduces a
//! formula one innermost operation at a time, and that trace drives both
//! the gold answer and the chain-of-thought exemplars built by [`prompt`].

pub mod algebra;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod formula;
pub mod generator;
pub mod oracle;
pub mod prompt;
pub mod scalar;
pub mod seed;
pub mod task;
pub mod verbal;

pub use dataset::DatasetRecord;
pub use error::{Error, Result};
pub use formula::Formula;
pub use prompt::PromptMethod;
pub use scalar::Scalar;
pub use task::{SplitParams, TaskKind};

/// Accuracy grid in floating point, as written to reports.
pub type AccuracyGrid = eval::Grid<f64>;
/// Accuracy grid in exact rationals.
pub type ExactGrid = eval::Grid<num_rational::Ratio<i64>>;
