//! Command-line frontend for `lipvessel`: file formats, run configuration,
//! dataset pairing and the `segment`, `batch` and `eval` commands.

pub mod args;
pub mod commands;
pub mod config;
pub mod dataset;
pub mod io;

use clap::Parser;

pub use args::{Cli, Command, PipelineFlags};
pub use commands::{batch, eval, execute, segment_image, CliError, SegmentReport};
pub use config::{parse_key_values, MapFormat, RunConfig};
pub use dataset::{DatasetLayout, Entry};

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .try_init();
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
