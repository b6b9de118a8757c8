use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use ubqp_cli::{cmd_bench, cmd_gen, cmd_solve, Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr().lock();
    let outcome = match &cli.command {
        Command::Solve(args) => cmd_solve(args, &mut stdout),
        Command::Bench(args) => cmd_bench(args, &mut stdout, &mut stderr),
        Command::Gen(args) => cmd_gen(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
