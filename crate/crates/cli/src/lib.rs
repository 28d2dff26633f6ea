//! Command-line experiments over `metric_lab`: every subcommand reads its
//! inputs from files or flags, writes at most one output file atomically and
//! returns a one-line summary.

mod args;
mod commands;
mod error;
mod manifest;
mod output;

pub use args::{BoundaryArgs, Cli, Command, GenArgs, GhArgs, QsArgs, ReproduceArgs, ScanArgs, ValidateArgs};
pub use commands::execute;
pub use error::CliError;
pub use manifest::{read_manifest, spec_to_argv, ExperimentSpec, Manifest};
pub use output::{sha256_file, write_atomic};

/// What a successful run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: String,
    pub outputs: Vec<std::path::PathBuf>,
    /// A batch that ran to the end but had failing entries.
    pub failed: bool,
}

/// Parses `argv` (including the program name) and runs it. Returns the exit
/// code and the text for stdout or stderr.
pub fn run_from_args<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => return (e.exit_code(), e.render().to_string()),
    };
    match execute(cli.command) {
        Ok(out) => (if out.failed { 1 } else { 0 }, out.summary),
        Err(e) => (e.exit_code(), format!("error: {e}")),
    }
}
