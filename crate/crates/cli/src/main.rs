//! `nonclass`: nonclassicality checks for single-mode bosonic states.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use log::LevelFilter;

use args::{Cli, Format};
use output::CliError;

fn init_logging() -> Result<(), CliError> {
    let level = match std::env::var("NONCLASS_LOG").as_deref() {
        Err(_) | Ok("") | Ok("quiet") => LevelFilter::Off,
        Ok("info") => LevelFilter::Info,
        Ok("debug") => LevelFilter::Debug,
        Ok(other) => {
            return Err(CliError::validation(format!(
                "NONCLASS_LOG must be quiet, info or debug, got {other:?}"
            )))
        }
    };
    env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .init();
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = cli.command.format();
    let result = init_logging().and_then(|()| commands::run(&cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match format {
                Some(Format::Json) | None => println!("{}", err.to_json()),
                Some(Format::Csv) => eprintln!("error: {}", err.message),
            }
            ExitCode::from(err.code)
        }
    }
}
