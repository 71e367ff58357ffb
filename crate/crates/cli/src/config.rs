//! Run configuration: list and range syntax, the γ₀ policy, and the
//! layering of a TOML file under command-line flags.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use lrsearch::lattice::{LatticeSpec, DEFAULT_SITE_CAP};
use lrsearch::Norm;
use serde::{Deserialize, Serialize, Serializer};

use crate::CliError;

/// Default fit window for the spectral dimension, in units of `ε(k_max)`.
///
/// Below ~3e-2 the finite-size tail of the coupling sum bends the lowest
/// levels at desk-scale sizes; above ~3e-1 the band curvature takes over.
pub const DEFAULT_DOS_WINDOW: (f64, f64) = (3e-2, 3e-1);
/// Default number of samples of the fidelity time series.
pub const DEFAULT_SAMPLES: usize = 201;
/// Default horizon of the fidelity time series, in predicted search times.
pub const DEFAULT_PERIODS: f64 = 2.0;
/// Relative slack when deciding whether a range end point is included.
const RANGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    GapScan,
    ChiMap,
    Fidelity,
    Dos,
    Phase,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::GapScan => "gap-scan",
            Command::ChiMap => "chi-map",
            Command::Fidelity => "fidelity",
            Command::Dos => "dos",
            Command::Phase => "phase",
            Command::Validate => "validate",
        }
    }
}

/// Deliberate defects for exercising `validate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Flip the sign of every coupling on the fast (FFT) path.
    CouplingSign,
}

/// How `γ₀` is chosen at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum GammaPolicy {
    Absolute(f64),
    TimesCritical(f64),
}

impl GammaPolicy {
    /// Accepts `0.3` (absolute), `x1.5`, `1.5xGammaC` or `xGammaC`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let t = text.trim();
        let bad = || CliError::Config(format!("invalid gamma value '{text}'"));
        let policy = if let Some(rest) = t.strip_suffix("xGammaC") {
            if rest.is_empty() {
                GammaPolicy::TimesCritical(1.0)
            } else {
                GammaPolicy::TimesCritical(parse_number(rest).map_err(|_| bad())?)
            }
        } else if let Some(rest) = t.strip_prefix('x') {
            GammaPolicy::TimesCritical(parse_number(rest).map_err(|_| bad())?)
        } else {
            GammaPolicy::Absolute(parse_number(t).map_err(|_| bad())?)
        };
        let value = match policy {
            GammaPolicy::Absolute(v) | GammaPolicy::TimesCritical(v) => v,
        };
        if !(value > 0.0 && value.is_finite()) {
            return Err(CliError::Config(format!("gamma '{text}' must be positive")));
        }
        Ok(policy)
    }

    pub fn resolve(self, gamma_c: f64) -> f64 {
        match self {
            GammaPolicy::Absolute(v) => v,
            GammaPolicy::TimesCritical(f) => f * gamma_c,
        }
    }
}

/// Parses a number, allowing powers of two written as `2^k`.
pub fn parse_number(text: &str) -> Result<f64, CliError> {
    let t = text.trim();
    let bad = || CliError::Config(format!("invalid number '{text}'"));
    if let Some((base, exp)) = t.split_once('^') {
        let base: f64 = base.trim().parse().map_err(|_| bad())?;
        let exp: i32 = exp.trim().parse().map_err(|_| bad())?;
        return Ok(base.powi(exp));
    }
    let v: f64 = t.parse().map_err(|_| bad())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// Parses a comma-separated list whose items are numbers or ranges:
/// `a:b` (unit step), `a:b:step` (arithmetic, end inclusive) or `a:b:xF`
/// (geometric with factor `F`).
pub fn parse_list(text: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(parse_number(v)?),
            [a, b] => out.extend(arithmetic(parse_number(a)?, parse_number(b)?, 1.0, item)?),
            [a, b, step] => {
                let (a, b) = (parse_number(a)?, parse_number(b)?);
                match step.trim().strip_prefix('x') {
                    Some(f) => out.extend(geometric(a, b, parse_number(f)?, item)?),
                    None => out.extend(arithmetic(a, b, parse_number(step)?, item)?),
                }
            }
            _ => return Err(CliError::Config(format!("invalid range '{item}'"))),
        }
    }
    Ok(out)
}

fn arithmetic(a: f64, b: f64, step: f64, item: &str) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || b < a {
        return Err(CliError::Config(format!(
            "range '{item}' needs a positive step and start <= end"
        )));
    }
    let count = ((b - a) / step + RANGE_SLACK).floor() as usize + 1;
    Ok((0..count).map(|i| a + i as f64 * step).collect())
}

fn geometric(a: f64, b: f64, factor: f64, item: &str) -> Result<Vec<f64>, CliError> {
    if !(factor > 1.0) || !(a > 0.0) || b < a {
        return Err(CliError::Config(format!(
            "range '{item}' needs a factor > 1 and 0 < start <= end"
        )));
    }
    let count = ((b / a).ln() / factor.ln() + RANGE_SLACK).floor() as usize + 1;
    Ok((0..count).map(|i| a * factor.powi(i as i32)).collect())
}

fn to_sizes(values: &[f64], what: &str) -> Result<Vec<usize>, CliError> {
    values
        .iter()
        .map(|&v| {
            let r = v.round();
            if (v - r).abs() > 1e-9 * v.abs().max(1.0) || r < 0.0 {
                Err(CliError::Config(format!(
                    "{what} value {v} is not a non-negative integer"
                )))
            } else {
                Ok(r as usize)
            }
        })
        .collect()
}

pub fn parse_norm(text: &str) -> Result<Norm, CliError> {
    match text.trim().to_ascii_lowercase().as_str() {
        "euclidean" => Ok(Norm::Euclidean),
        "manhattan" => Ok(Norm::Manhattan),
        other => Err(CliError::Config(format!(
            "unknown norm '{other}' (expected euclidean or manhattan)"
        ))),
    }
}

fn parse_toggle(text: &str) -> Result<bool, CliError> {
    match text.trim().to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" => Ok(true),
        "off" | "false" | "no" => Ok(false),
        other => Err(CliError::Config(format!(
            "invalid toggle '{other}' (expected on or off)"
        ))),
    }
}

/// A list entry in the configuration file: range text, one number or an
/// array of numbers.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ListValue {
    Number(f64),
    Numbers(Vec<f64>),
    Text(String),
}

impl ListValue {
    fn values(&self) -> Result<Vec<f64>, CliError> {
        match self {
            ListValue::Number(v) => Ok(vec![*v]),
            ListValue::Numbers(v) => Ok(v.clone()),
            ListValue::Text(t) => parse_list(t),
        }
    }
}

/// A scalar entry that may be written as text or as a native value.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ScalarValue {
    Bool(bool),
    Number(f64),
    Text(String),
}

impl ScalarValue {
    fn text(&self) -> String {
        match self {
            ScalarValue::Bool(b) => b.to_string(),
            ScalarValue::Number(v) => v.to_string(),
            ScalarValue::Text(t) => t.clone(),
        }
    }
}

/// One layer of settings (configuration file or command line); absent
/// entries fall through to the layer below.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    pub d: Option<ListValue>,
    pub n: Option<ListValue>,
    pub alpha: Option<ListValue>,
    pub gamma: Option<ListValue>,
    pub norm: Option<String>,
    pub out: Option<PathBuf>,
    pub oracle: Option<ScalarValue>,
    pub max_n: Option<usize>,
    pub workers: Option<usize>,
    pub dos_window: Option<ListValue>,
    pub samples: Option<usize>,
    pub periods: Option<f64>,
    pub inject_fault: Option<Fault>,
}

impl Settings {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config file: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// `top` wins wherever it is set.
    pub fn overlay(self, top: Settings) -> Settings {
        Settings {
            d: top.d.or(self.d),
            n: top.n.or(self.n),
            alpha: top.alpha.or(self.alpha),
            gamma: top.gamma.or(self.gamma),
            norm: top.norm.or(self.norm),
            out: top.out.or(self.out),
            oracle: top.oracle.or(self.oracle),
            max_n: top.max_n.or(self.max_n),
            workers: top.workers.or(self.workers),
            dos_window: top.dos_window.or(self.dos_window),
            samples: top.samples.or(self.samples),
            periods: top.periods.or(self.periods),
            inject_fault: top.inject_fault.or(self.inject_fault),
        }
    }
}

fn serialize_norm<S: Serializer>(norm: &Norm, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(norm.name())
}

/// A fully resolved and validated run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub d: Vec<usize>,
    /// Linear sizes; empty means the built-in grid (validate) or "not
    /// needed" (phase).
    pub n: Vec<usize>,
    /// Exponents; empty means the built-in grid (validate only).
    pub alpha: Vec<f64>,
    pub gamma: Vec<GammaPolicy>,
    #[serde(serialize_with = "serialize_norm")]
    pub norm: Norm,
    pub out: Option<PathBuf>,
    pub oracle: bool,
    /// Cap on the number of sites `N = n^d`.
    pub max_n: usize,
    pub workers: usize,
    pub dos_window: (f64, f64),
    pub samples: usize,
    pub periods: f64,
    pub inject_fault: Option<Fault>,
}

/// One lattice point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub d: usize,
    pub n: usize,
    pub alpha: f64,
    pub gamma: GammaPolicy,
}

impl GridPoint {
    pub fn spec(&self, norm: Norm) -> Result<LatticeSpec, CliError> {
        Ok(LatticeSpec::new(self.d, self.n, self.alpha, norm)?)
    }
}

/// Linear sizes of the built-in validation grid.
pub fn validation_sizes(d: usize) -> &'static [usize] {
    match d {
        1 => &[8, 64, 512],
        2 => &[4, 16],
        3 => &[4, 8],
        _ => &[4],
    }
}

/// Exponents of the built-in validation grid: one per regime.
pub fn validation_alphas(d: usize) -> Vec<f64> {
    let df = d as f64;
    vec![0.5 * df, 1.25 * df, 1.75 * df, df + 3.0]
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl RunConfig {
    /// Resolves a settings stack for `command`, applying defaults and
    /// checking every grid point.
    pub fn resolve(command: Command, settings: Settings) -> Result<Self, CliError> {
        let validate = command == Command::Validate;
        let d = match &settings.d {
            Some(v) => to_sizes(&v.values()?, "d")?,
            None if validate => vec![1, 2, 3],
            None => vec![1],
        };
        let n = match &settings.n {
            Some(v) => to_sizes(&v.values()?, "n")?,
            None => Vec::new(),
        };
        let alpha = match &settings.alpha {
            Some(v) => v.values()?,
            None => Vec::new(),
        };
        let gamma = match &settings.gamma {
            Some(ListValue::Text(t)) => t
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(GammaPolicy::parse)
                .collect::<Result<Vec<_>, _>>()?,
            Some(other) => other
                .values()?
                .into_iter()
                .map(GammaPolicy::Absolute)
                .collect(),
            None if validate => [0.5, 1.0, 2.0].map(GammaPolicy::TimesCritical).to_vec(),
            None => vec![GammaPolicy::TimesCritical(1.0)],
        };
        let norm = match &settings.norm {
            Some(t) => parse_norm(t)?,
            None => Norm::Euclidean,
        };
        let oracle = match &settings.oracle {
            Some(v) => parse_toggle(&v.text())?,
            None => validate,
        };
        let dos_window = match &settings.dos_window {
            Some(v) => match v.values()?.as_slice() {
                &[lo, hi] if lo > 0.0 && hi > lo => (lo, hi),
                _ => {
                    return Err(CliError::Config(
                        "dos-window needs two values 0 < lo < hi".into(),
                    ))
                }
            },
            None => DEFAULT_DOS_WINDOW,
        };
        let workers = settings.workers.unwrap_or_else(default_workers);
        if workers == 0 {
            return Err(CliError::Config("workers must be >= 1".into()));
        }
        let samples = settings.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples < 2 {
            return Err(CliError::Config("samples must be >= 2".into()));
        }
        let periods = settings.periods.unwrap_or(DEFAULT_PERIODS);
        if !(periods > 0.0 && periods.is_finite()) {
            return Err(CliError::Config("periods must be positive".into()));
        }
        let config = RunConfig {
            command,
            d,
            n,
            alpha,
            gamma,
            norm,
            out: settings.out,
            oracle,
            max_n: settings.max_n.unwrap_or(DEFAULT_SITE_CAP),
            workers,
            dos_window,
            samples,
            periods,
            inject_fault: settings.inject_fault,
        };
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> Result<(), CliError> {
        let empty = |what: &str| CliError::Config(format!("{what} list is empty"));
        if self.d.is_empty() {
            return Err(empty("d"));
        }
        if self.gamma.is_empty() {
            return Err(empty("gamma"));
        }
        if self.alpha.is_empty() && self.command != Command::Validate {
            return Err(empty("alpha"));
        }
        let needs_n = !matches!(self.command, Command::Validate | Command::Phase);
        if self.n.is_empty() && needs_n {
            return Err(empty("n"));
        }
        if self.inject_fault.is_some() && self.command != Command::Validate {
            return Err(CliError::Config(
                "fault injection is only accepted by validate".into(),
            ));
        }
        if self.command == Command::Phase {
            // only (d, α) matter; the exponent domain is checked by the lattice
            for &d in &self.d {
                for &a in &self.alpha {
                    LatticeSpec::new(d, 4, a, self.norm)?;
                }
            }
            return Ok(());
        }
        let points = self.grid();
        if self.command == Command::Fidelity && points.len() != 1 {
            return Err(CliError::Config(format!(
                "fidelity needs exactly one (d, n, alpha, gamma) point, got {}",
                points.len()
            )));
        }
        for p in &points {
            let spec = p.spec(self.norm)?;
            if spec.sites() > self.max_n {
                return Err(lrsearch::Error::Resource {
                    what: "lattice",
                    requested: spec.sites(),
                    cap: self.max_n,
                }
                .into());
            }
        }
        Ok(())
    }

    /// Grid points in emission order: d-major, then n, α and γ₀.
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &d in &self.d {
            let sizes: Vec<usize> = if self.n.is_empty() {
                validation_sizes(d).to_vec()
            } else {
                self.n.clone()
            };
            let alphas = if self.alpha.is_empty() {
                validation_alphas(d)
            } else {
                self.alpha.clone()
            };
            for &n in &sizes {
                for &alpha in &alphas {
                    for &gamma in &self.gamma {
                        out.push(GridPoint { d, n, alpha, gamma });
                    }
                }
            }
        }
        out
    }

    /// Path of the JSON sidecar accompanying `--out`.
    pub fn sidecar_path(&self) -> Option<PathBuf> {
        self.out.as_ref().map(|p| {
            let mut s = p.as_os_str().to_owned();
            s.push(".json");
            PathBuf::from(s)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(s: &str) -> Option<ListValue> {
        Some(ListValue::Text(s.into()))
    }

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("1,2, 5").unwrap(), vec![1.0, 2.0, 5.0]);
        assert_eq!(
            parse_list("2^8:2^11:x2").unwrap(),
            vec![256.0, 512.0, 1024.0, 2048.0]
        );
        assert_eq!(parse_list("0.5:1.5:0.5").unwrap(), vec![0.5, 1.0, 1.5]);
        assert_eq!(parse_list("4:6").unwrap(), vec![4.0, 5.0, 6.0]);
        let thirds = parse_list("0:1:0.1").unwrap();
        assert_eq!(thirds.len(), 11);
        assert!(parse_list("1:0:0.1").is_err());
        assert!(parse_list("1:4:x1").is_err());
        assert!(parse_list("a").is_err());
        assert!(parse_list("").unwrap().is_empty());
    }

    #[test]
    fn gamma_forms() {
        assert_eq!(
            GammaPolicy::parse("0.3").unwrap(),
            GammaPolicy::Absolute(0.3)
        );
        assert_eq!(
            GammaPolicy::parse("x2").unwrap(),
            GammaPolicy::TimesCritical(2.0)
        );
        assert_eq!(
            GammaPolicy::parse("1.5xGammaC").unwrap(),
            GammaPolicy::TimesCritical(1.5)
        );
        assert_eq!(
            GammaPolicy::parse("xGammaC").unwrap(),
            GammaPolicy::TimesCritical(1.0)
        );
        assert!(GammaPolicy::parse("-1").is_err());
        assert!(GammaPolicy::parse("xx").is_err());
        assert_eq!(GammaPolicy::TimesCritical(2.0).resolve(0.25), 0.5);
    }

    #[test]
    fn flags_override_file() {
        let file = Settings::from_toml(
            "d = 2\nn = \"4,8\"\nalpha = [1.0, 3.0]\nnorm = \"manhattan\"\noracle = \"on\"\nworkers = 3\n",
        )
        .unwrap();
        let flags = Settings {
            n: text("16"),
            workers: Some(5),
            ..Settings::default()
        };
        let cfg = RunConfig::resolve(Command::GapScan, file.overlay(flags)).unwrap();
        assert_eq!(cfg.d, vec![2]);
        assert_eq!(cfg.n, vec![16]);
        assert_eq!(cfg.alpha, vec![1.0, 3.0]);
        assert_eq!(cfg.norm, Norm::Manhattan);
        assert!(cfg.oracle);
        assert_eq!(cfg.workers, 5);
        assert_eq!(cfg.gamma, vec![GammaPolicy::TimesCritical(1.0)]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Settings::from_toml("dimension = 2").is_err());
    }

    #[test]
    fn invalid_configs() {
        let base = || Settings {
            n: text("16"),
            alpha: text("1.5"),
            ..Settings::default()
        };
        assert!(RunConfig::resolve(Command::GapScan, base()).is_ok());
        let no_alpha = Settings {
            alpha: text(""),
            ..base()
        };
        assert!(matches!(
            RunConfig::resolve(Command::GapScan, no_alpha),
            Err(CliError::Config(_))
        ));
        let odd = Settings {
            n: text("15"),
            ..base()
        };
        assert!(RunConfig::resolve(Command::GapScan, odd).is_err());
        let big = Settings {
            max_n: Some(8),
            ..base()
        };
        assert!(matches!(
            RunConfig::resolve(Command::GapScan, big),
            Err(CliError::Core(lrsearch::Error::Resource { .. }))
        ));
        let two = Settings {
            alpha: text("1,2"),
            ..base()
        };
        assert!(RunConfig::resolve(Command::Fidelity, two).is_err());
        let fault = Settings {
            inject_fault: Some(Fault::CouplingSign),
            ..base()
        };
        assert!(RunConfig::resolve(Command::GapScan, fault).is_err());
    }

    #[test]
    fn grid_order_is_n_major_alpha_minor() {
        let cfg = RunConfig::resolve(
            Command::ChiMap,
            Settings {
                n: text("8,4"),
                alpha: text("2,1"),
                ..Settings::default()
            },
        )
        .unwrap();
        let order: Vec<(usize, f64)> = cfg.grid().iter().map(|p| (p.n, p.alpha)).collect();
        assert_eq!(order, vec![(8, 2.0), (8, 1.0), (4, 2.0), (4, 1.0)]);
    }

    #[test]
    fn validation_defaults() {
        let cfg = RunConfig::resolve(Command::Validate, Settings::default()).unwrap();
        assert!(cfg.oracle);
        assert_eq!(cfg.d, vec![1, 2, 3]);
        assert_eq!(cfg.grid().len(), (3 + 2 + 2) * 4 * 3);
    }

    #[test]
    fn sidecar_sits_next_to_the_csv() {
        let cfg = RunConfig::resolve(
            Command::Phase,
            Settings {
                alpha: text("1"),
                out: Some("runs/scan.csv".into()),
                ..Settings::default()
            },
        )
        .unwrap();
        assert_eq!(
            cfg.sidecar_path().unwrap(),
            PathBuf::from("runs/scan.csv.json")
        );
    }
}
