mod args;
mod commands;
mod error;
mod input;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};

fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let threads = match std::env::var("PMLKIT_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("PMLKIT_THREADS must be a non-negative integer, got `{v}`")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))
}

fn run(cli: &Cli) -> CliResult<u8> {
    let pool = thread_pool()?;
    pool.install(|| match &cli.command {
        Command::Compute(a) => commands::compute(a),
        Command::Verify(a) => commands::verify(a),
        Command::Continuous(a) => commands::continuous(a),
        Command::Tail(a) => commands::tail(a),
        Command::Discretize(a) => commands::discretize(a),
    })
}

fn main() -> ExitCode {
    // Usage errors exit 1: clap's own code 2 is reserved for oracle violations.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
