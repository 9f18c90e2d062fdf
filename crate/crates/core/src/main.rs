use std::path::PathBuf;
use std::process::ExitCode;

use aether_lab::cli::{check_report, run, Command, RunConfig};
use clap::Parser;

/// Homogenization and elastodynamics of two-phase planar composites.
#[derive(Parser)]
#[command(name = "aether-lab", version)]
struct Args {
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (defaults to the config's `output` or `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Validate and print the hypothesis report without writing files.
    #[arg(long)]
    check: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let result = RunConfig::from_json(&text).and_then(|cfg| {
        if args.check {
            check_report(args.command, &cfg).map(|s| print!("{s}"))
        } else {
            let dir = args
                .out
                .clone()
                .or_else(|| cfg.output.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out"));
            run(args.command, &cfg, &dir).map(|files| {
                for f in files {
                    println!("{}", f.display());
                }
            })
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
