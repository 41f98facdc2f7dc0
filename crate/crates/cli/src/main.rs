//! `sts`: batch harness around `sts-core`.
//!
//! Exit codes: 0 success, 2 target density missed, 3 verification
//! failure, 4 configuration error, 1 anything else.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(4) } else { ExitCode::SUCCESS };
        }
    };
    let out_dir = cli.out_dir.clone();
    let result = match cli.command {
        Command::Catalog(a) => commands::catalog(a, &out_dir),
        Command::Run(a) => commands::run(a, &out_dir),
        Command::Trials(a) => commands::trials(a, &out_dir),
        Command::Verify(a) => commands::verify(a),
        Command::Trajectory(a) => commands::trajectory(a, &out_dir),
        Command::Design(a) => commands::design(a, &out_dir),
        Command::Count(a) => commands::count(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let code = f.code();
            if let Failure::Config(e) | Failure::Other(e) = &f {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(code)
        }
    }
}
