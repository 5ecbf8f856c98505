use std::process::ExitCode;

use clap::Parser;

use circarray::cli::{self, Cli};

fn main() -> ExitCode {
    match cli::run(Cli::parse()) {
        Ok(out) => {
            for line in &out.lines {
                println!("{line}");
            }
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            if out.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
