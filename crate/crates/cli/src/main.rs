use std::process::ExitCode;

use bulgaria_cli::{execute, parse_cli, CliError};

/// Caps the rayon pool when `BULGARIA_THREADS` is set.
fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("BULGARIA_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "BULGARIA_THREADS must be a positive integer, got '{value}'"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))
}

fn run() -> Result<String, CliError> {
    let config = parse_cli(std::env::args_os())?;
    configure_threads()?;
    execute(&config)
}

fn main() -> ExitCode {
    match run() {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e @ CliError::Clap(_)) => {
            // clap prints help and version to stdout, usage errors to stderr
            if let CliError::Clap(inner) = &e {
                let _ = inner.print();
            }
            ExitCode::from(e.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
