use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use nonlocal_cli::{run, Body, Cli, EXIT_VALIDATION};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let output = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    };
    let mut text = output.render(cli.json);
    if !cli.json && matches!(output.body, Body::Report(_)) {
        text.push_str(&format!("elapsed_seconds: {:.3}\n", start.elapsed().as_secs_f64()));
    }
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_VALIDATION as u8);
    }
    for f in &output.failures {
        eprintln!("assertion failed: {f}");
    }
    ExitCode::from(output.exit_code as u8)
}
