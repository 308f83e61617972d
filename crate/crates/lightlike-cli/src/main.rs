use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lightlike_cli::{emit, run, CliError, RunConfig};

/// Run a verification job described by a JSON config and print its report.
#[derive(Parser, Debug)]
#[command(name = "lightlike", version)]
struct Args {
    /// JSON job file.
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", args.config.display())))?;
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = args.tol {
        cfg.tol = tol;
    }
    let report = run(&cfg)?;
    let bytes = emit(&report);
    match &args.out {
        Some(path) => {
            std::fs::write(path, &bytes).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?
        }
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes).and_then(|_| out.flush()).map_err(|e| CliError::Invalid(e.to_string()))?;
        }
    }
    if let Some(stage) = report.first_failure() {
        eprintln!("lightlike: {} failed at stage `{}`", report.command, stage.name);
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("lightlike: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
