use std::process::ExitCode;

use clap::Parser;
use hgame::cli::{execute, Cli, EXIT_INPUT, EXIT_OK};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Exit 2 is reserved for ego collisions.
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    ExitCode::from(execute(&cli, &mut std::io::stdout().lock()))
}
