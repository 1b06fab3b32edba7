mod commands;
mod config;
mod error;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match RunConfig::resolve(cli.command, &cli.opts).and_then(|cfg| commands::execute(&cfg)) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("swe-period: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
