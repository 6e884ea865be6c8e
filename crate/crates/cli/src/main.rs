//! `psiosc`: evaluate ψ_Θ, check the counting and measure estimates, and run
//! the oscillation experiments.
//!
//! Exit codes: 0 all checks passed, 2 a check failed, 3 the check is vacuous
//! at these parameters, 4 input error, 5 resource cap.

mod args;
mod commands;
mod config;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};
use psiosc::mc::with_threads;
use psiosc::Error;

use args::Cli;

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Resource(_) => 5,
        Error::Precondition(_) => 3,
        _ => 4,
    }
}

fn run(argv: Vec<OsString>) -> u8 {
    let argv = match config::expand(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 4;
        }
    };
    let cli = match Cli::command()
        .try_get_matches_from(argv)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 4,
            };
        }
    };
    let outcome = match with_threads(cli.threads, || commands::run(&cli.command, cli.verbose)) {
        Ok(Ok(o)) => o,
        Ok(Err(e)) | Err(e) => {
            eprintln!("error: {e}");
            return error_code(&e);
        }
    };
    for (path, body) in &outcome.files {
        let written = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map_or(Ok(()), std::fs::create_dir_all)
            .and_then(|_| std::fs::write(path, body));
        if let Err(e) = written {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 5;
        }
    }
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&outcome.json).expect("JSON values serialize")
        );
    } else {
        for l in &outcome.lines {
            println!("{l}");
        }
    }
    outcome.status.code() as u8
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os().collect()))
}
