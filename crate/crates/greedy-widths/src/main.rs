use std::process::ExitCode;

use clap::Parser;
use greedy_widths::cli::{run, Cli};
use greedy_widths::error::{ErrorJson, EXIT_CONFIG, EXIT_OK};

fn report_error(json: bool, error: &'static str, message: String, exit_code: i32) {
    if json {
        let e = ErrorJson {
            error,
            message,
            exit_code,
        };
        eprintln!(
            "{}",
            serde_json::to_string(&e).expect("error JSON serializes")
        );
    } else {
        eprintln!("error: {message}");
    }
}

fn main() -> ExitCode {
    let json_errors = std::env::args().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::from(EXIT_OK as u8);
            }
            if json_errors {
                report_error(true, "usage", e.to_string().trim().to_string(), EXIT_CONFIG);
            } else {
                let _ = e.print();
            }
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            report_error(
                cli.global.json_errors,
                e.kind(),
                e.to_string(),
                e.exit_code(),
            );
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
