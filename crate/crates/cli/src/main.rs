use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dissim_cli::{parse_config, run, CliError, Command};

/// Trotterized open-system simulation, error bounds and resource counts.
#[derive(Debug, Parser)]
#[command(name = "dissim", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Trotter step count; replaces plan.m / plan.epsilon.
    #[arg(long)]
    m: Option<u64>,
    /// Target error; replaces plan.m / plan.epsilon.
    #[arg(long)]
    epsilon: Option<f64>,
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::io(format!("reading {}", args.config.display()), e))?;
    let mut config = parse_config(&text)?;
    config.apply_overrides(args.seed, args.m, args.epsilon)?;
    let outcome = run(args.command, &config, &args.out)?;
    println!("{}", outcome.summary);
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(hint) = e.hint() {
                eprintln!("hint: {hint}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
