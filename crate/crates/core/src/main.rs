use std::process::ExitCode;

use clap::Parser;
use relsw::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let record = e.record();
            eprintln!("{}", serde_json::to_string(&record).expect("error records serialize"));
            ExitCode::from(record.exit_code as u8)
        }
    }
}
