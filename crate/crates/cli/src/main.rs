use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lrsearch_cli::config::{Command, Fault, ListValue, RunConfig, ScalarValue, Settings};
use lrsearch_cli::{run_and_emit, EXIT_CONFIG, WORKERS_ENV};

/// Sweeps, figure data and validation for quantum spatial search with
/// power-law hopping on periodic hypercubic lattices.
#[derive(Debug, Parser)]
#[command(name = "lrsearch", version)]
struct Cli {
    /// What to run.
    #[arg(value_enum)]
    command: Command,
    /// Lattice dimension(s), 1 to 4.
    #[arg(long)]
    d: Option<String>,
    /// Linear sizes: a comma list, a:b:step or a:b:xF (e.g. 2^8:2^14:x2).
    #[arg(long)]
    n: Option<String>,
    /// Hopping exponents: a comma list or a:b:step.
    #[arg(long)]
    alpha: Option<String>,
    /// Hopping weight: an absolute value or a multiple of the critical
    /// value (x1.5 or 1.5xGammaC); comma lists are accepted.
    #[arg(long)]
    gamma: Option<String>,
    /// Distance convention: euclidean or manhattan.
    #[arg(long)]
    norm: Option<String>,
    /// CSV output path; the sidecar goes to PATH.json. Without it the CSV
    /// goes to stdout and the sidecar to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Consult the dense oracles: on or off.
    #[arg(long)]
    oracle: Option<String>,
    /// Cap on the number of lattice sites N = n^d.
    #[arg(long)]
    max_n: Option<usize>,
    /// TOML file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads for the sweep.
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Spectral-dimension fit window "lo,hi" in units of the bandwidth.
    #[arg(long)]
    dos_window: Option<String>,
    /// Samples of the fidelity time series.
    #[arg(long)]
    samples: Option<usize>,
    /// Horizon of the fidelity time series in predicted search times.
    #[arg(long)]
    periods: Option<f64>,
    /// Deliberately break the fast path (validate only).
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<Fault>,
}

impl Cli {
    fn settings(&self) -> Settings {
        let list = |s: &Option<String>| s.clone().map(ListValue::Text);
        Settings {
            d: list(&self.d),
            n: list(&self.n),
            alpha: list(&self.alpha),
            gamma: list(&self.gamma),
            norm: self.norm.clone(),
            out: self.out.clone(),
            oracle: self.oracle.clone().map(ScalarValue::Text),
            max_n: self.max_n,
            workers: self.workers,
            dos_window: list(&self.dos_window),
            samples: self.samples,
            periods: self.periods,
            inject_fault: self.inject_fault,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let resolved = cli
        .config
        .as_deref()
        .map(Settings::from_file)
        .unwrap_or_else(|| Ok(Settings::default()))
        .and_then(|file| RunConfig::resolve(cli.command, file.overlay(cli.settings())));
    let code = match resolved {
        Ok(config) => run_and_emit(&config, &mut std::io::stdout(), &mut std::io::stderr()),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    };
    ExitCode::from(code as u8)
}
