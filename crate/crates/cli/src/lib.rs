//! Command-line front end: `simulate`, `fit` and `bench`.
//!
//! Exit codes: 0 success, 1 fit stopped at the iteration cap, 2 bad flags or
//! malformed input, 3 I/O failure, 4 degenerate fit, 5 too many failed bench
//! replicates.

pub mod args;
pub mod commands;
pub mod error;

pub use args::{Cli, Command, FitSettings, Flags, LambdaChoice};
pub use commands::{fit_dataset, run_bench, run_replicate, BenchOutcome, ReplicateRecord, ReplicateStatus};
pub use error::CliError;

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = cli
        .command
        .flags()
        .clone()
        .resolve()
        .and_then(|flags| match cli.command {
            Command::Simulate(_) => commands::simulate(&flags),
            Command::Fit(_) => commands::fit(&flags),
            Command::Bench(_) => commands::bench(&flags),
        });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mixep: {e}");
            e.exit_code()
        }
    }
}
