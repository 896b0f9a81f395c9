use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pnp_cli::{execute, parse_config, CliError, Command};

/// Electrodiffusion through narrow channels: singular-limit fluxes, layer
/// orbits, finite-mu steady states and transient runs.
#[derive(Debug, Parser)]
#[command(name = "pnp", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed; overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return fail(&CliError::io(args.config.display().to_string(), e)),
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out_dir = args.out.unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
    if let Some(out) = out_dir.to_str() {
        cfg.output_dir = out.to_string();
    }
    let (report, code) = execute(args.command, &cfg, &out_dir);
    match &report.failure {
        Some(f) => eprintln!("{} failed ({}): {}", report.command, f.kind, f.message),
        None => println!("{}: ok, wrote {} files to {}", report.command, report.files.len(), out_dir.display()),
    }
    ExitCode::from(code as u8)
}
