//! The `firesig` command line: dataset generation, signatures, forest
//! training and evaluation, and the scene pipeline.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 configuration error,
//! 3 generation failure, 4 mask error, 5 model mismatch, 6 scene-file
//! schema error.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod svg;

use std::ffi::OsString;

use clap::Parser;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult, Failure};

pub const THREADS_ENV: &str = "FIRESIG_THREADS";

/// Caps the global rayon pool from `FIRESIG_THREADS`, if set.
fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::msg(Failure::Config, format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // the pool can only be set once per process; a second call is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    match &cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Signature(a) => commands::signature(a),
        Command::Features(a) => commands::features(a),
        Command::Train(a) => commands::train_cmd(a),
        Command::Eval(a) => commands::eval(a),
        Command::Explain(a) => commands::explain(a),
        Command::Project(a) => commands::project(a),
        Command::Graph(a) => commands::graph(a),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Failure::Config.code() } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.failure.code()
        }
    }
}
