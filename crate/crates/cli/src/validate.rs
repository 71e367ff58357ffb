//! Invariant and oracle-equivalence checks over a grid, with optional
//! fault injection to prove that the checks can fail.

use lrsearch::lattice::build_dispersion;
use lrsearch::oracle::{brute_dispersion, DENSE_CAP};
use lrsearch::spectrum::{amplitude, gamma_critical, solve_spectrum};
use lrsearch::{Error, SearchParams};
use serde::Serialize;
use serde_json::json;

use crate::commands::{oracle_deviation, oracle_times, sweep};
use crate::config::{Fault, GridPoint, RunConfig};
use crate::output::{Cell, Output, Table};
use crate::CliError;

/// `|ε_fft − ε_direct| / κ₀`.
pub const TOL_DISPERSION: f64 = 1e-10;
/// `max(0, −min ε) / κ₀`.
pub const TOL_NONNEGATIVE: f64 = 1e-12;
/// `|Σε − Nκ₀| / (Nκ₀)`.
pub const TOL_TRACE: f64 = 1e-10;
/// `|A(0) − 1/√N|`.
pub const TOL_AMPLITUDE_ZERO: f64 = 1e-12;
/// `|Σ|𝒲ᵢ|² − 1|` and `|Σ|𝒮ᵢ|² − 1|`.
pub const TOL_COMPLETENESS: f64 = 1e-10;
/// `max |A_secular − A_dense|` over the oracle times.
pub const TOL_ORACLE: f64 = 1e-9;
/// `max |A|² − 1` over the oracle times.
pub const TOL_UNITARITY: f64 = 1e-10;

/// Outcome of one check at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    pub d: usize,
    pub n: usize,
    pub sites: usize,
    pub alpha: f64,
    pub gamma0: f64,
    pub tolerance: f64,
    pub observed: f64,
    pub passed: bool,
}

/// Runs every check at `point`. With `oracle` the dense references are
/// consulted, which requires `N ≤ DENSE_CAP`.
pub fn check_point(point: &GridPoint, config: &RunConfig) -> Result<Vec<CheckResult>, CliError> {
    let spec = point.spec(config.norm)?;
    if config.oracle && spec.sites() > DENSE_CAP {
        return Err(Error::Resource {
            what: "oracle lattice",
            requested: spec.sites(),
            cap: DENSE_CAP,
        }
        .into());
    }
    let table = build_dispersion(&spec)?;
    let sites = table.sites();
    let kappa0 = table.kappa0();
    let gamma0 = point.gamma.resolve(gamma_critical(&table));
    let mut out = Vec::new();
    let mut record = |check, tolerance: f64, observed: f64| {
        out.push(CheckResult {
            check,
            d: point.d,
            n: point.n,
            sites,
            alpha: point.alpha,
            gamma0,
            tolerance,
            observed,
            passed: observed <= tolerance,
        })
    };

    // flipping every coupling sign negates the dispersion exactly
    let fast: Vec<f64> = match config.inject_fault {
        Some(Fault::CouplingSign) => table.values().iter().map(|v| -v).collect(),
        None => table.values().to_vec(),
    };
    if config.oracle {
        let direct = brute_dispersion(&spec)?;
        let worst = fast
            .iter()
            .zip(&direct)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        record("dispersion_fft_vs_direct", TOL_DISPERSION, worst / kappa0);
    }
    let lowest = fast.iter().copied().fold(f64::INFINITY, f64::min);
    record(
        "dispersion_nonnegative",
        TOL_NONNEGATIVE,
        (-lowest).max(0.0) / kappa0,
    );
    let trace: f64 = fast.iter().sum();
    let expected = sites as f64 * kappa0;
    record(
        "trace_identity",
        TOL_TRACE,
        (trace - expected).abs() / expected,
    );

    let spectrum = solve_spectrum(&SearchParams::new(&table, gamma0)?)?;
    let roots = spectrum.roots();
    let poles = spectrum.poles();
    let violations = roots
        .iter()
        .enumerate()
        .filter(|&(i, &r)| {
            let above = i == 0 || poles[i - 1].0 < r;
            let below = poles.get(i).is_none_or(|&(p, _)| r < p);
            !(above && below)
        })
        .count();
    record("root_interlacing", 0.0, violations as f64);
    let a0 = amplitude(&spectrum, 0.0);
    let reference = 1.0 / (sites as f64).sqrt();
    record(
        "amplitude_at_zero",
        TOL_AMPLITUDE_ZERO,
        (a0 - num_complex::Complex64::new(reference, 0.0)).norm(),
    );
    let w: f64 = spectrum.w_sq().iter().sum();
    let s: f64 = spectrum.s_sq().iter().sum();
    record("target_completeness", TOL_COMPLETENESS, (w - 1.0).abs());
    record("uniform_completeness", TOL_COMPLETENESS, (s - 1.0).abs());

    let times = oracle_times(&spectrum);
    let peak = times
        .iter()
        .map(|&t| amplitude(&spectrum, t).norm_sqr())
        .fold(0.0, f64::max);
    record("unitarity", TOL_UNITARITY, (peak - 1.0).max(0.0));
    if config.oracle {
        let deviation = oracle_deviation(&spec, gamma0, &spectrum, &times)?;
        record("amplitude_secular_vs_dense", TOL_ORACLE, deviation);
    }
    Ok(out)
}

pub const VALIDATE_COLUMNS: &[&str] = &[
    "check",
    "d",
    "n",
    "N",
    "alpha",
    "norm",
    "gamma0",
    "tolerance",
    "observed",
    "passed",
];

pub fn validate(config: &RunConfig) -> Result<Output, CliError> {
    let points = config.grid();
    let results: Vec<CheckResult> = sweep(&points, |p| check_point(p, config))?
        .into_iter()
        .flatten()
        .collect();
    let mut table = Table::new(VALIDATE_COLUMNS);
    for r in &results {
        table.push(vec![
            Cell::text(r.check),
            Cell::Int(r.d as u64),
            Cell::Int(r.n as u64),
            Cell::Int(r.sites as u64),
            Cell::num(r.alpha),
            Cell::text(config.norm.name()),
            Cell::num(r.gamma0),
            Cell::num(r.tolerance),
            Cell::num(r.observed),
            Cell::Bool(r.passed),
        ]);
    }
    let mut failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.check)
        .collect();
    failed.sort_unstable();
    failed.dedup();
    Ok(Output {
        summary: json!({
            "passed": failed.is_empty(),
            "failed_checks": failed,
            "checks": results,
        }),
        table,
        passed: failed.is_empty(),
    })
}
