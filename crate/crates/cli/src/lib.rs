//! Experiment runner behind the `hybridisc` binary.

// Negated comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;

use std::path::{Path, PathBuf};

pub use config::ExperimentConfig;
pub use error::CliError;
pub use experiments::{run_experiment, Outcome};

/// Environment fallback for the worker count.
pub const THREADS_ENV: &str = "HYBRIDISC_THREADS";

/// Worker count from the flag, then the environment, else rayon's default (`0`).
pub fn resolve_threads(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Config(format!(
                "{THREADS_ENV} must be a non-negative integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(0),
    }
}

/// Runs `config` on `threads` workers and writes the CSV (and optionally every backing
/// report) below `out_dir`. Returns the CSV path.
pub fn run(
    config: &ExperimentConfig,
    out_dir: &Path,
    threads: usize,
    dump_reports: bool,
) -> Result<PathBuf, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let outcome = pool.install(|| run_experiment(config))?;
    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(&config.experiment.output);
    std::fs::write(&csv_path, outcome.to_csv())?;
    if dump_reports && !outcome.reports.is_empty() {
        let stem = csv_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let dir = out_dir.join(format!("{stem}_reports"));
        std::fs::create_dir_all(&dir)?;
        for (label, text) in &outcome.reports {
            std::fs::write(dir.join(format!("{label}.txt")), text)?;
        }
    }
    Ok(csv_path)
}
