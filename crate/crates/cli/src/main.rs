use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use knnsv_cli::{Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match knnsv_cli::run(&cli).context("knnsv failed") {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<CliError>().map_or(1, CliError::exit_code);
            ExitCode::from(code)
        }
    }
}
