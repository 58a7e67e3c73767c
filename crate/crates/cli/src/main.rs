use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hybridisc_cli::{resolve_threads, run, CliError, ExperimentConfig};

/// Runs a hybridisc experiment described by a config file and writes its CSV.
#[derive(Debug, Parser)]
#[command(name = "hybridisc", version)]
struct Args {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the CSV and reports.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for sweeps (falls back to HYBRIDISC_THREADS).
    #[arg(long)]
    threads: Option<usize>,
    /// Also write the solve report behind every CSV row.
    #[arg(long)]
    dump_reports: bool,
}

fn execute(args: &Args) -> Result<PathBuf, CliError> {
    let config = ExperimentConfig::from_path(&args.config)?;
    let threads = resolve_threads(args.threads)?;
    run(&config, &args.out, threads, args.dump_reports)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(path) => {
            println!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
