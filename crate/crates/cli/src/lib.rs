//! Library side of the `nestbench` command: each subcommand is a plain
//! function so that tests can drive the pipeline in-process.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod manifest;
pub mod predictions;

pub use args::{Cli, Command};
pub use error::{exit_code, UsageError};

pub fn execute(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Gen(a) => {
            let n = commands::gen(a)?;
            println!("wrote {n} records to {}", a.out.display());
        }
        Command::Run(a) => {
            let o = commands::run(a)?;
            println!(
                "answered {} records ({} reused); provider calls {}, cache hits {}, retries {}",
                o.answered, o.reused, o.stats.provider_calls, o.stats.cache_hits, o.stats.retries
            );
        }
        Command::Score(a) => {
            let s = commands::score(a)?;
            println!("{} / {}: {}/{} correct, accuracy {:.2}", s.task, s.method, s.correct, s.total, s.accuracy);
        }
        Command::Report(a) => {
            let r = commands::report(a)?;
            println!("reported {} runs to {}", r.runs.len(), a.out.display());
        }
    }
    Ok(())
}
