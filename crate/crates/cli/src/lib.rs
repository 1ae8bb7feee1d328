//! Command-line runner and file formats for parroting-baseline experiments.
//!
//! The pure metric and experiment code lives in `parroteval-core`; this
//! crate adds dataset adapters, the normalized JSON-lines corpus format,
//! CSV/JSON result files and a rayon-backed executor.

mod cli;
pub mod error;
pub mod exec;
pub mod formats;
pub mod report;

use std::ffi::OsString;

use clap::Parser;

pub use cli::Cli;
pub use error::{exit, CliError};

/// Parse `args` (program name first), run the command and return the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    match cli::dispatch(cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
