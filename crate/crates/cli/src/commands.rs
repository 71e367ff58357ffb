//! The sweep commands. Every command maps grid points to rows in parallel
//! and emits them in grid order, so the worker count never changes the
//! output.

use std::f64::consts::PI;

use lrsearch::asymptotics::{
    chi_asymptotic, classify, gap_asymptotic, spectral_dimension, unscaled_asymptotics, Regime,
};
use lrsearch::lattice::{
    build_dispersion, cumulative_dos, estimate_spectral_dimension, rescaled_gap, spectral_gap,
};
use lrsearch::oracle::{dense_amplitude, dense_overlaps, symmetric_sector};
use lrsearch::spectrum::{
    amplitude, chi, gamma_critical, s_ell, search_time, solve_spectrum, two_level_energies,
};
use lrsearch::{Error, LatticeSpec, SearchParams, SearchSpectrum};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{GridPoint, RunConfig};
use crate::output::{apd, Cell, Output, Table};
use crate::CliError;

/// Number of times at which secular and dense amplitudes are compared.
pub const ORACLE_TIMES: usize = 50;

/// Evaluates `f` on every point in parallel, preserving grid order.
pub fn sweep<T, F>(points: &[GridPoint], f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(&GridPoint) -> Result<T, CliError> + Sync + Send,
{
    points.par_iter().map(f).collect()
}

fn regime_of(d: usize, alpha: f64) -> Option<Regime> {
    classify(d, alpha).ok()
}

fn regime_label(regime: Option<Regime>) -> Cell {
    Cell::text(regime.map_or("boundary", |r| r.kind.name()))
}

fn optimal_cell(regime: Option<Regime>) -> Cell {
    match regime {
        Some(r) => Cell::Bool(r.optimal),
        None => Cell::opt(None),
    }
}

/// Evenly spaced times `0, …, period` at which the oracle is consulted.
pub fn oracle_times(spectrum: &SearchSpectrum) -> Vec<f64> {
    let period = spectrum.natural_period();
    (0..ORACLE_TIMES)
        .map(|i| period * i as f64 / (ORACLE_TIMES - 1) as f64)
        .collect()
}

/// Largest `|A_secular(t) − A_dense(t)|` over `times`, with the dense side
/// built in the symmetric sector around the target.
pub fn oracle_deviation(
    spec: &LatticeSpec,
    gamma0: f64,
    spectrum: &SearchSpectrum,
    times: &[f64],
) -> Result<f64, Error> {
    let dense = dense_overlaps(&symmetric_sector(spec, gamma0)?)?;
    Ok(times
        .iter()
        .map(|&t| (amplitude(spectrum, t) - dense_amplitude(&dense, t)).norm())
        .fold(0.0, f64::max))
}

fn optional<T>(r: Result<T, Error>) -> Result<Option<T>, CliError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(
            Error::OutOfRegime { .. }
            | Error::Pole { .. }
            | Error::NoMaximum { .. }
            | Error::Resource { .. }
            | Error::InsufficientPoints { .. },
        ) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub const GAP_SCAN_COLUMNS: &[&str] = &[
    "d",
    "n",
    "N",
    "alpha",
    "norm",
    "gamma0",
    "gamma_c",
    "chi_exact",
    "chi_asymptotic",
    "delta_exact",
    "Delta_exact",
    "Delta_asymptotic",
    "apd_Delta",
    "delta_asymptotic",
    "apd_delta",
    "kappa0_exact",
    "kappa0_asymptotic",
    "apd_kappa0",
    "eps_kmax_exact",
    "eps_kmax_asymptotic",
    "apd_eps_kmax",
    "regime",
    "optimal",
    "d_s",
    "T",
    "fidelity_at_T",
    "oracle_max_dev",
];

/// Exact and asymptotic gaps, `κ₀`, `ε(k_max)`, `χ` and the search time
/// on every grid point.
pub fn gap_scan(config: &RunConfig) -> Result<Output, CliError> {
    let points = config.grid();
    let rows = sweep(&points, |p| {
        let spec = p.spec(config.norm)?;
        let table = build_dispersion(&spec)?;
        let sites = table.sites() as f64;
        let gamma_c = gamma_critical(&table);
        let gamma0 = p.gamma.resolve(gamma_c);
        let regime = regime_of(p.d, p.alpha);
        let big_delta = rescaled_gap(&table);
        let predicted_gap =
            optional(gap_asymptotic(p.d, p.alpha, sites))?.and_then(|g| g.predicted);
        let unscaled = optional(unscaled_asymptotics(p.d, p.alpha, sites))?;
        let delta = spectral_gap(&table);

        let spectrum = solve_spectrum(&SearchParams::new(&table, gamma0)?)?;
        let found = optional(search_time(&spectrum))?;
        let oracle = if config.oracle {
            optional(oracle_deviation(
                &spec,
                gamma0,
                &spectrum,
                &oracle_times(&spectrum),
            ))?
        } else {
            None
        };
        let pair = |exact: f64, approx: Option<f64>| {
            [
                Cell::opt(approx),
                Cell::opt(approx.and_then(|a| apd(exact, a))),
            ]
        };
        let mut row = vec![
            Cell::Int(p.d as u64),
            Cell::Int(p.n as u64),
            Cell::Int(table.sites() as u64),
            Cell::num(p.alpha),
            Cell::text(config.norm.name()),
            Cell::num(gamma0),
            Cell::num(gamma_c),
            Cell::num(chi(&table)),
            Cell::opt(chi_asymptotic(p.d, p.alpha).ok()),
            Cell::num(delta),
            Cell::num(big_delta),
        ];
        row.extend(pair(big_delta, predicted_gap));
        row.extend(pair(delta, unscaled.map(|u| u.delta)));
        row.push(Cell::num(table.kappa0()));
        row.extend(pair(table.kappa0(), unscaled.map(|u| u.kappa0)));
        row.push(Cell::num(table.eps_kmax()));
        row.extend(pair(table.eps_kmax(), unscaled.map(|u| u.e_kmax)));
        row.extend([
            regime_label(regime),
            optimal_cell(regime),
            Cell::opt(spectral_dimension(p.d, p.alpha).ok()),
            Cell::opt(found.map(|(t, _)| t)),
            Cell::opt(found.map(|(_, f)| f)),
            Cell::opt(oracle),
        ]);
        Ok(row)
    })?;
    let mut table = Table::new(GAP_SCAN_COLUMNS);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Output {
        summary: json!({ "points": points.len() }),
        table,
        passed: true,
    })
}

pub const CHI_MAP_COLUMNS: &[&str] = &[
    "d",
    "n",
    "N",
    "alpha",
    "norm",
    "gamma_c",
    "S2",
    "chi_exact",
    "chi_asymptotic",
    "regime",
    "optimal",
];

/// Exact `χ = S₁/√S₂` and its thermodynamic limit over `(N, α)`.
pub fn chi_map(config: &RunConfig) -> Result<Output, CliError> {
    let mut points = config.grid();
    // γ₀ does not enter χ: one row per (d, n, α)
    points.dedup_by(|a, b| (a.d, a.n, a.alpha) == (b.d, b.n, b.alpha));
    let rows = sweep(&points, |p| {
        let table = build_dispersion(&p.spec(config.norm)?)?;
        let regime = regime_of(p.d, p.alpha);
        Ok(vec![
            Cell::Int(p.d as u64),
            Cell::Int(p.n as u64),
            Cell::Int(table.sites() as u64),
            Cell::num(p.alpha),
            Cell::text(config.norm.name()),
            Cell::num(gamma_critical(&table)),
            Cell::num(s_ell(&table, 2)?),
            Cell::num(chi(&table)),
            Cell::opt(chi_asymptotic(p.d, p.alpha).ok()),
            regime_label(regime),
            optimal_cell(regime),
        ])
    })?;
    let mut table = Table::new(CHI_MAP_COLUMNS);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Output {
        summary: json!({ "points": points.len() }),
        table,
        passed: true,
    })
}

pub const FIDELITY_COLUMNS: &[&str] = &[
    "t",
    "re_A",
    "im_A",
    "fidelity",
    "two_level",
    "oracle_fidelity",
];

/// Time series of the transfer amplitude for a single grid point, with the
/// two-level form `χ² sin²(χt/√N)` alongside.
pub fn fidelity(config: &RunConfig) -> Result<Output, CliError> {
    let p = config.grid()[0];
    let spec = p.spec(config.norm)?;
    let table = build_dispersion(&spec)?;
    let sites = table.sites() as f64;
    let gamma_c = gamma_critical(&table);
    let gamma0 = p.gamma.resolve(gamma_c);
    let spectrum = solve_spectrum(&SearchParams::new(&table, gamma0)?)?;
    let x = chi(&table);
    let predicted_t = PI * sites.sqrt() / (2.0 * x);
    let horizon = config.periods * predicted_t;
    let dense = if config.oracle {
        Some(dense_overlaps(&symmetric_sector(&spec, gamma0)?)?)
    } else {
        None
    };
    let times: Vec<f64> = (0..config.samples)
        .map(|i| horizon * i as f64 / (config.samples - 1) as f64)
        .collect();
    let rows: Vec<Vec<Cell>> = times
        .par_iter()
        .map(|&t| {
            let a = amplitude(&spectrum, t);
            let two_level = (x * (x * t / sites.sqrt()).sin()).powi(2);
            vec![
                Cell::num(t),
                Cell::num(a.re),
                Cell::num(a.im),
                Cell::num(a.norm_sqr()),
                Cell::num(two_level),
                Cell::opt(dense.as_ref().map(|s| dense_amplitude(s, t).norm_sqr())),
            ]
        })
        .collect();
    let mut out = Table::new(FIDELITY_COLUMNS);
    rows.into_iter().for_each(|r| out.push(r));

    let found = optional(search_time(&spectrum))?;
    let s1 = s_ell(&table, 1)?;
    let s2 = s_ell(&table, 2)?;
    let (e0, e1) = two_level_energies(s1, s2, gamma0, table.sites())?;
    let roots = spectrum.roots();
    Ok(Output {
        summary: json!({
            "d": p.d,
            "n": p.n,
            "N": table.sites(),
            "alpha": p.alpha,
            "gamma0": gamma0,
            "gamma_c": gamma_c,
            "chi": x,
            "T": found.map(|(t, _)| t),
            "fidelity_at_T": found.map(|(_, f)| f),
            "T_two_level": predicted_t,
            "E0": roots[0],
            "E1": roots.get(1).copied(),
            "E0_two_level": e0,
            "E1_two_level": e1,
        }),
        table: out,
        passed: true,
    })
}

pub const DOS_COLUMNS: &[&str] = &[
    "d",
    "n",
    "N",
    "alpha",
    "norm",
    "lambda",
    "rho_cd",
    "d_s_fit",
    "d_s_theory",
    "regime",
];

/// Cumulative density of states per grid point with the fitted and the
/// predicted spectral dimension (both empty outside `d < α < d+2`).
pub fn dos(config: &RunConfig) -> Result<Output, CliError> {
    let mut points = config.grid();
    points.dedup_by(|a, b| (a.d, a.n, a.alpha) == (b.d, b.n, b.alpha));
    let blocks = sweep(&points, |p| {
        let table = build_dispersion(&p.spec(config.norm)?)?;
        let curve = cumulative_dos(&table);
        let theory = spectral_dimension(p.d, p.alpha).ok();
        let fit = match theory {
            Some(_) => optional(estimate_spectral_dimension(&curve, config.dos_window))?,
            None => None,
        };
        let regime = regime_label(regime_of(p.d, p.alpha));
        let rows: Vec<Vec<Cell>> = curve
            .iter()
            .map(|&(lambda, rho)| {
                vec![
                    Cell::Int(p.d as u64),
                    Cell::Int(p.n as u64),
                    Cell::Int(table.sites() as u64),
                    Cell::num(p.alpha),
                    Cell::text(config.norm.name()),
                    Cell::num(lambda),
                    Cell::num(rho),
                    Cell::opt(fit),
                    Cell::opt(theory),
                    regime.clone(),
                ]
            })
            .collect();
        let fit_summary = json!({
            "d": p.d, "n": p.n, "alpha": p.alpha, "d_s_fit": fit, "d_s_theory": theory,
        });
        Ok((rows, fit_summary))
    })?;
    let mut table = Table::new(DOS_COLUMNS);
    let mut fits = Vec::new();
    for (rows, fit) in blocks {
        rows.into_iter().for_each(|r| table.push(r));
        fits.push(fit);
    }
    Ok(Output {
        summary: json!({ "window": [config.dos_window.0, config.dos_window.1], "fits": fits }),
        table,
        passed: true,
    })
}

pub const PHASE_COLUMNS: &[&str] = &[
    "d",
    "alpha",
    "regime",
    "optimal",
    "alpha_c",
    "at_alpha_c",
    "d_s",
    "chi_asymptotic",
    "gap_exponent",
];

/// Regime, optimality and spectral dimension over `(d, α)`.
pub fn phase(config: &RunConfig) -> Result<Output, CliError> {
    let mut table = Table::new(PHASE_COLUMNS);
    for &d in &config.d {
        for &alpha in &config.alpha {
            let regime = regime_of(d, alpha);
            let alpha_c = 1.5 * d as f64;
            table.push(vec![
                Cell::Int(d as u64),
                Cell::num(alpha),
                regime_label(regime),
                optimal_cell(regime),
                Cell::num(alpha_c),
                Cell::Bool(alpha == alpha_c),
                Cell::opt(spectral_dimension(d, alpha).ok()),
                Cell::opt(chi_asymptotic(d, alpha).ok()),
                Cell::opt(gap_asymptotic(d, alpha, 1.0).ok().map(|g| g.exponent)),
            ]);
        }
    }
    Ok(Output {
        summary: json!({ "points": table.rows.len() }),
        table,
        passed: true,
    })
}
