mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use report::EXIT_INPUT;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let res = match &cli.command {
        Command::Verify(a) => commands::verify::run(a),
        Command::Conditions(a) => commands::conditions::run(a),
        Command::Run(a) => commands::run::run(a),
        Command::Stable(a) => commands::stable::run(a),
        Command::RainbowGen(a) => commands::rainbow_gen::run(a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("lll: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
