mod gen;
mod report;
mod run;
mod score;

pub use gen::gen;
pub use report::{report, ReportOutcome};
pub use run::{build_gateway, run, RunOutcome};
pub use score::{score, ScoreReport, SCORE_FILE};
