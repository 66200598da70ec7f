use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ingham_cli::commands;
use ingham_cli::{CliError, Command, Envelope, ErrorEnvelope, Format, RunContext};

#[derive(Debug, Parser)]
#[command(name = "ingham", version, about = "Discrete Ingham and Haraux inequalities: frame constants and observability checks")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON config; `-` reads stdin.
    #[arg(long, env = "INGHAM_INPUT")]
    input: Option<PathBuf>,
    /// Report destination; stdout when absent.
    #[arg(long, env = "INGHAM_OUTPUT")]
    output: Option<PathBuf>,
    #[arg(long, env = "INGHAM_TOL", default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, env = "INGHAM_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "INGHAM_FORMAT", value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn read_input(path: &Option<PathBuf>) -> Result<Vec<u8>, CliError> {
    let path = path.as_ref().ok_or_else(|| CliError::Usage("--input is required".into()))?;
    let mut bytes = Vec::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_end(&mut bytes)?;
    } else {
        bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    }
    Ok(bytes)
}

fn emit(path: &Option<PathBuf>, bytes: &[u8]) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

fn run(cli: &Cli, ctx: &mut RunContext) -> Result<Vec<u8>, CliError> {
    if !(cli.tol > 0.0) || !cli.tol.is_finite() {
        return Err(CliError::Usage(format!("--tol must be positive and finite, got {}", cli.tol)));
    }
    let input = read_input(&cli.input)?;
    ctx.set_input(&input);
    let config: serde_json::Value = serde_json::from_slice(&input)?;
    let out = commands::dispatch(cli.command, config, ctx)?;
    Envelope::new(ctx, out).render(cli.format)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let mut ctx = RunContext::new(cli.command, cli.seed, cli.tol);
    match run(&cli, &mut ctx) {
        Ok(bytes) => match emit(&cli.output, &bytes) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write report: {e}");
                ExitCode::from(1)
            }
        },
        Err(err) => {
            eprintln!("error: {err}");
            let code = err.exit_code();
            let report = ErrorEnvelope::new(&ctx, &err).to_json();
            if let Err(e) = emit(&cli.output, &report) {
                eprintln!("error: cannot write error report: {e}");
            }
            ExitCode::from(code)
        }
    }
}
