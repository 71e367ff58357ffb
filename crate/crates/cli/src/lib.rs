//! Command-line surface of `lrsearch`: parameter sweeps that reproduce the
//! figure data, and a validation run against the dense oracles.
//!
//! Every command produces a [`Table`](output::Table) written as CSV with a
//! fixed schema, plus a JSON sidecar with the resolved configuration,
//! versions and wall time. Grid points are evaluated on a bounded worker
//! pool and emitted in grid order, so output bytes do not depend on the
//! number of workers.
//!
//! Exit codes: `0` success, `2` configuration or domain error, `3` failed
//! validation.

pub mod commands;
pub mod config;
pub mod output;
pub mod validate;

use std::io::Write;
use std::time::Instant;

use config::{Command, RunConfig};
use output::Output;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "LRSEARCH_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] lrsearch::Error),
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG
    }
}

/// Runs the command on the calling thread's rayon pool.
pub fn execute(config: &RunConfig) -> Result<Output, CliError> {
    match config.command {
        Command::GapScan => commands::gap_scan(config),
        Command::ChiMap => commands::chi_map(config),
        Command::Fidelity => commands::fidelity(config),
        Command::Dos => commands::dos(config),
        Command::Phase => commands::phase(config),
        Command::Validate => validate::validate(config),
    }
}

/// Runs the command on a dedicated pool of `config.workers` threads.
pub fn run(config: &RunConfig) -> Result<Output, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", config.workers)))?;
    pool.install(|| execute(config))
}

fn write_file(path: &std::path::Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Runs and emits: CSV to `--out` (sidecar beside it) or CSV to `stdout`
/// and the sidecar to `stderr`. Returns the process exit code.
pub fn run_and_emit(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let start = Instant::now();
    let result = run(config).and_then(|output| {
        let csv = output.table.to_csv();
        let meta = output::sidecar(config, &output, start.elapsed());
        let meta = serde_json::to_string_pretty(&meta).expect("sidecar serialises") + "\n";
        match (&config.out, config.sidecar_path()) {
            (Some(path), Some(side)) => {
                write_file(path, &csv)?;
                write_file(&side, &meta)?;
            }
            _ => {
                let io = |e: std::io::Error| CliError::Io {
                    path: "<stdout>".into(),
                    message: e.to_string(),
                };
                stdout.write_all(csv.as_bytes()).map_err(io)?;
                stderr.write_all(meta.as_bytes()).map_err(io)?;
            }
        }
        Ok(output.passed)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            let _ = writeln!(stderr, "validation failed");
            EXIT_VALIDATION
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
