mod args;
mod bench;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use minpoly_core::format::ErrorRecord;

use crate::args::{Cli, Command};
use crate::commands::{emit, CliResult};

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("error: {message}");
    let rec = ErrorRecord::new(kind, message);
    if let Ok(text) = serde_json::to_string_pretty(&rec) {
        println!("{text}");
    }
    ExitCode::from(code)
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = cli.common.resolve()?;
    match &cli.command {
        Command::Minpoly { input } => commands::cmd_minpoly(input, &cfg),
        Command::Charpoly { input } => commands::cmd_charpoly(input, &cfg),
        Command::Verify { input, candidate } => {
            commands::cmd_verify(input, candidate.as_deref(), &cfg)
        }
        Command::Gen {
            family,
            scale,
            output,
            no_conjugate,
        } => commands::cmd_gen(*family, *scale, output.as_deref(), !*no_conjugate, &cfg),
        Command::Bench {
            families,
            scale,
            jobs,
        } => bench::cmd_bench(families, *scale, *jobs, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("usage error")
                .trim_start_matches("error: ")
                .to_string();
            let _ = e.print();
            let rec = ErrorRecord::new("usage", first);
            if emit(None, &rec).is_err() {
                return ExitCode::from(1);
            }
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string(), 1),
    }
}
