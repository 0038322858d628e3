use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use nestbench_core::{PromptMethod, TaskKind};

#[derive(Debug, Parser)]
#[command(name = "nestbench", version, about = "Nested-formula reasoning benchmark driver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a dataset file.
    Gen(GenArgs),
    /// Query a model on every record of a dataset.
    Run(RunArgs),
    /// Judge predictions against gold targets.
    Score(ScoreArgs),
    /// Summarize scored runs into comparison tables.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_parser = parse_task)]
    pub task: TaskKind,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), required_unless_present = "all_splits", conflicts_with = "all_splits")]
    pub nesting: Option<u32>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), required_unless_present = "all_splits", conflicts_with = "all_splits")]
    pub operands: Option<u32>,
    /// Emit every benchmark split (N and O in 2..=4), `count` records each.
    #[arg(long)]
    pub all_splits: bool,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_parser = parse_method)]
    pub method: PromptMethod,
    #[arg(long)]
    pub model: String,
    /// TOML file with endpoint, limits and sampling settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// `openai` (chat-completions endpoint from the config), `mock:oracle`, or `mock:noisy:<error rate>:<seed>`.
    #[arg(long, default_value = "openai", value_parser = ProviderSpec::from_str)]
    pub provider: ProviderSpec,
    /// Directory for cached responses.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Also write every prompt to `prompts.jsonl` in the output directory.
    #[arg(long)]
    pub dump_prompts: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Method label; a known method name also selects the answer cue.
    /// Defaults to the method in the run manifest next to the predictions.
    #[arg(long)]
    pub method: Option<String>,
    /// Model label; defaults to the run manifest.
    #[arg(long)]
    pub model: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Scored run directories.
    #[arg(long, num_args = 1.., required = true)]
    pub runs: Vec<PathBuf>,
    #[arg(long, default_value = "zero_shot")]
    pub baseline: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProviderSpec {
    ChatCompletions,
    MockOracle,
    MockNoisy { error_rate: f64, seed: u64 },
}

impl FromStr for ProviderSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["openai"] => Ok(ProviderSpec::ChatCompletions),
            ["mock", "oracle"] => Ok(ProviderSpec::MockOracle),
            ["mock", "noisy", rate, seed] => {
                let error_rate: f64 = rate.parse().map_err(|_| format!("bad error rate `{rate}`"))?;
                if !(0.0..=1.0).contains(&error_rate) {
                    return Err(format!("error rate {error_rate} outside [0, 1]"));
                }
                let seed = seed.parse().map_err(|_| format!("bad seed `{seed}`"))?;
                Ok(ProviderSpec::MockNoisy { error_rate, seed })
            }
            _ => Err(format!("unknown provider `{s}`; expected openai, mock:oracle or mock:noisy:<rate>:<seed>")),
        }
    }
}

impl std::fmt::Display for ProviderSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProviderSpec::ChatCompletions => f.write_str("openai"),
            ProviderSpec::MockOracle => f.write_str("mock:oracle"),
            ProviderSpec::MockNoisy { error_rate, seed } => write!(f, "mock:noisy:{error_rate}:{seed}"),
        }
    }
}

fn parse_task(s: &str) -> Result<TaskKind, String> {
    s.parse().map_err(|e: nestbench_core::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<PromptMethod, String> {
    s.parse().map_err(|e: nestbench_core::Error| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn provider_specs() {
        assert_eq!("mock:oracle".parse::<ProviderSpec>().unwrap(), ProviderSpec::MockOracle);
        assert_eq!(
            "mock:noisy:0.4:13".parse::<ProviderSpec>().unwrap(),
            ProviderSpec::MockNoisy { error_rate: 0.4, seed: 13 }
        );
        assert!("mock:noisy:1.5:1".parse::<ProviderSpec>().is_err());
        assert!("mock".parse::<ProviderSpec>().is_err());
        assert_eq!(ProviderSpec::MockNoisy { error_rate: 0.4, seed: 13 }.to_string(), "mock:noisy:0.4:13");
    }

    #[test]
    fn zero_nesting_is_rejected() {
        let r = Cli::try_parse_from(["nestbench", "gen", "--task", "arithmetic", "--nesting", "0", "--operands", "2", "--out", "x"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
    }
}
