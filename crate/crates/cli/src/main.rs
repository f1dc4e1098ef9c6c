mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = config::Cli::parse();
    let code = match config::RunConfig::resolve(cli) {
        Ok(config) => commands::run(&config),
        Err(msg) => {
            eprintln!("error: {msg}");
            commands::EXIT_INPUT
        }
    };
    ExitCode::from(code)
}
