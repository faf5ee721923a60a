use std::process::ExitCode;

use clap::Parser;
use lietp_cli::{describe_error, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&cli, &args) {
        Ok(report) => {
            print!("{}", report.text);
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{}", describe_error(&e));
            ExitCode::from(2)
        }
    }
}
