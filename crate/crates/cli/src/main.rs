mod args;
mod commands;
mod config;
mod error;
mod output;

use std::ffi::OsString;
use std::panic;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser};

use args::{Cli, Command};
use error::CliError;

fn parse(argv: Vec<OsString>) -> Result<Cli, clap::Error> {
    let command = Cli::command();
    let matches = command.clone().try_get_matches_from(&argv)?;
    let cli = Cli::from_arg_matches(&matches)?;
    let Some(path) = &cli.config else {
        return Ok(cli);
    };
    let extra = config::load(path)
        .and_then(|entries| config::extra_args(&command, &matches, &entries))
        .map_err(|e| Cli::command().error(clap::error::ErrorKind::InvalidValue, e.to_string()))?;
    Cli::try_parse_from(argv.into_iter().chain(extra))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let outcome = match &cli.command {
        Command::Analyze(a) => commands::analyze(a)?,
        Command::Critical(a) => commands::critical(a)?,
        Command::Sweep(a) => commands::sweep(a, cli.threads)?,
        Command::Phase(a) => commands::phase(a, cli.threads)?,
    };
    let text = outcome.document.render(cli.format)?;
    output::write(&text, cli.output.as_deref())?;
    match outcome.error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match parse(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version exit 0; every parse failure is a usage error.
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match panic::catch_unwind(|| run(&cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(3),
    }
}
