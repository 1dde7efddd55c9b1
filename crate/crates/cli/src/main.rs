use std::io;
use std::process::ExitCode;

use clap::Parser;
use vacuum_census_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match vacuum_census_cli::run(cli, io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
