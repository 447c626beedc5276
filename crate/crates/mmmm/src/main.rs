use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use mmmm::args::Cli;
use mmmm::failure::Failure;

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match mmmm::run(&cli).and_then(|text| emit(&cli, &text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("mmmm: {err}");
            err.exit_code()
        }
    }
}
