use std::process::ExitCode;

use cellalloc::cli::{run, RunOutcome};
use cellalloc::Error;

fn main() -> ExitCode {
    match run(std::env::args()) {
        Ok(RunOutcome::Success) => ExitCode::SUCCESS,
        Ok(RunOutcome::ComparisonFailed) => ExitCode::from(3),
        Err(
            err @ (Error::Config(_)
            | Error::TooManyHosts { .. }
            | Error::UnknownAllocator(_)
            | Error::EmptyGrid { .. }),
        ) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
