mod args;
mod commands;
mod error;
mod table1;

use args::{read_config, Cli, CommandKind, RunConfig};
use clap::Parser;
use error::CliError;
use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

fn run(cli: Cli) -> Result<i32, CliError> {
    let file = match &cli.config {
        Some(path) => read_config(path)?,
        None => BTreeMap::new(),
    };
    let (kind, opts) = cli.command.split();
    let cfg = RunConfig::resolve(kind, opts, file)?;
    let outcome = match cfg.command {
        CommandKind::Constants => commands::constants(&cfg)?,
        CommandKind::Verify => commands::verify(&cfg)?,
        CommandKind::Count => commands::count(&cfg)?,
        CommandKind::Table1 => commands::table1(&cfg)?,
        CommandKind::Registry => commands::registry_view(&cfg)?,
        CommandKind::Group => commands::group(&cfg)?,
    };
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(outcome.report.as_bytes()).map_err(CliError::run)?;
    stdout.flush().map_err(CliError::run)?;
    Ok(outcome.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
