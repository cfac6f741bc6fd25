//! `regenstat` command-line front end.
//!
//! Settings come from an optional TOML or JSON file (`--config`) and are
//! overridden by flags. The output directory can also be set through
//! `REGENSTAT_OUT_DIR`. Exit codes: 0 success, 2 configuration error,
//! 3 runtime abort.

mod config;
mod run;

use std::process::ExitCode;

use clap::Parser;

use config::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
