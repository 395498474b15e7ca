mod args;
mod config;
mod error;
mod run;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};

use args::Cli;
use error::CliError;

/// Clap's report folded into one line, up to the usage section.
fn one_line(e: &clap::Error) -> String {
    e.render()
        .to_string()
        .lines()
        .map(str::trim)
        .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
        .filter(|l| !l.is_empty() && !l.starts_with("tip:"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse() -> Result<Cli, ExitCode> {
    let cmd = Cli::command()
        .mut_subcommands(|s| s.args_override_self(true).allow_negative_numbers(true));
    let argv = match config::expand_args(&cmd, std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            return Err(ExitCode::from(2));
        }
    };
    let matches = cmd.try_get_matches_from(argv).and_then(|m| Cli::from_arg_matches(&m));
    match matches {
        Ok(cli) => Ok(cli),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            Err(ExitCode::SUCCESS)
        }
        Err(e) => {
            eprintln!("{}", one_line(&e));
            Err(ExitCode::from(2))
        }
    }
}

fn write_output(path: Option<&std::path::Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match parse() {
        Ok(c) => c,
        Err(code) => return code,
    };
    let env_seed = match args::seed_from_env(std::env::var("RMTLAB_SEED").ok()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: invalid value for 'RMTLAB_SEED': {e}");
            return ExitCode::from(2);
        }
    };
    let out = cli.command.common().out.clone();
    let result = run::run(cli.command, env_seed)
        .and_then(|o| write_output(out.as_deref(), &o.text).map(|_| o.pass));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
