mod args;
mod commands;
mod report;

use std::io::IsTerminal;
use std::process::ExitCode;

use clap::{ColorChoice, CommandFactory, FromArgMatches};

use args::{Cli, Command};

pub fn color_enabled() -> bool {
    std::env::var_os("BYRDSCOPE_NO_COLOR").is_none() && std::io::stderr().is_terminal()
}

fn main() -> ExitCode {
    let color = color_enabled();
    let mut cmd = Cli::command();
    if !color {
        cmd = cmd.color(ColorChoice::Never);
    }
    let matches = cmd.get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };

    let result = match cli.command {
        Command::Run(a) => commands::run(&a),
        Command::Trace(a) => commands::trace(&a),
        Command::Replay(a) => commands::replay(&a),
        Command::Check(a) => commands::check(&a),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            report::error(color, &failure);
            failure.exit_code()
        }
    }
}
