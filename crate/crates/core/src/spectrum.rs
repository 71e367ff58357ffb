//! Exact search eigensystem from the secular equation `ℱ(E) = 1`, the
//! transfer amplitude `⟨w|e^{-iHt}|s⟩` and the derived observables.
//!
//! The search Hamiltonian is `H = γ₀ L - |w⟩⟨w|`. Only eigenstates with a
//! nonzero overlap on the target carry amplitude; there is exactly one per
//! distinct Laplacian level, found as a root of
//! `ℱ(E) = (1/N) Σ_k 1/(γ₀ε(k) - E) = 1`.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::lattice::{fft_nd, DispersionTable, DEFAULT_SITE_CAP};
use crate::{Error, Result};

/// Relative bisection width (against the bracket length) before polishing.
const BRACKET_REL_WIDTH: f64 = 1e-13;
/// Minimum relative distance (against the bandwidth) from any pole at
/// which `ℱ` is evaluated.
const POLE_GUARD: f64 = 1e-13;
/// Samples per natural period when scanning for the first maximum.
pub const SCAN_SAMPLES_PER_PERIOD: f64 = 400.0;
/// Scan horizon in natural periods.
pub const SCAN_HORIZON_PERIODS: f64 = 4.0;
/// Relative tolerance of the golden-section refinement of `T`.
pub const SEARCH_TIME_TOL: f64 = 1e-6;
/// Normalisation tolerance accepted by [`participation_ratio`].
pub const NORM_TOL: f64 = 1e-8;

/// A dispersion table together with the hopping weight and target site.
#[derive(Debug, Clone, Copy)]
pub struct SearchParams<'a> {
    table: &'a DispersionTable,
    gamma0: f64,
    target: usize,
}

impl<'a> SearchParams<'a> {
    /// Parameters with the target at the origin.
    pub fn new(table: &'a DispersionTable, gamma0: f64) -> Result<Self> {
        Self::with_target(table, gamma0, 0)
    }

    pub fn with_target(table: &'a DispersionTable, gamma0: f64, target: usize) -> Result<Self> {
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(Error::InvalidSpec(format!("gamma0 = {gamma0} must be > 0")));
        }
        if target >= table.sites() {
            return Err(Error::InvalidSpec(format!(
                "target {target} outside [0, {})",
                table.sites()
            )));
        }
        Ok(Self {
            table,
            gamma0,
            target,
        })
    }

    pub fn table(&self) -> &'a DispersionTable {
        self.table
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn target(&self) -> usize {
        self.target
    }
}

/// Overlap-carrying eigenvalues `E_i` with `|𝒲_i|² = |⟨w|ψ_i⟩|²` and
/// `|𝒮_i|² = |⟨s|ψ_i⟩|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpectrum {
    roots: Vec<f64>,
    w_sq: Vec<f64>,
    s_sq: Vec<f64>,
    poles: Vec<(f64, usize)>,
    gamma0: f64,
    sites: usize,
}

impl SearchSpectrum {
    /// Assemble a spectrum from its parts (for synthetic spectra and tests).
    /// `poles` are the distinct values `γ₀ε` with multiplicities.
    pub fn from_parts(
        roots: Vec<f64>,
        w_sq: Vec<f64>,
        s_sq: Vec<f64>,
        poles: Vec<(f64, usize)>,
        gamma0: f64,
        sites: usize,
    ) -> Result<Self> {
        if roots.len() != w_sq.len() || roots.len() != s_sq.len() {
            return Err(Error::InvalidSpec(
                "roots and weights differ in length".into(),
            ));
        }
        Ok(Self {
            roots,
            w_sq,
            s_sq,
            poles,
            gamma0,
            sites,
        })
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn w_sq(&self) -> &[f64] {
        &self.w_sq
    }

    pub fn s_sq(&self) -> &[f64] {
        &self.s_sq
    }

    pub fn poles(&self) -> &[(f64, usize)] {
        &self.poles
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// `S_ℓ` recovered from the poles: `(1/N) Σ_{p≠0} m (γ₀/p)^ℓ`.
    fn s_from_poles(&self, ell: i32) -> f64 {
        let sum: f64 = self
            .poles
            .iter()
            .filter(|&&(p, _)| p > 0.0)
            .map(|&(p, m)| m as f64 * (self.gamma0 / p).powi(ell))
            .sum();
        sum / self.sites as f64
    }

    /// `χ = S₁/√S₂` of the underlying dispersion.
    pub fn chi(&self) -> f64 {
        self.s_from_poles(1) / self.s_from_poles(2).sqrt()
    }

    /// Natural search period `π√N/χ` (twice the two-level search time).
    pub fn natural_period(&self) -> f64 {
        PI * (self.sites as f64).sqrt() / self.chi()
    }
}

/// `S_ℓ = (1/N) Σ_{k≠0} ε(k)^{-ℓ}`.
pub fn s_ell(table: &DispersionTable, ell: u32) -> Result<f64> {
    if ell == 0 {
        return Err(Error::domain("s_ell", "ell must be >= 1"));
    }
    let sum: f64 = table
        .distinct()
        .iter()
        .skip(1)
        .rev()
        .map(|&(v, m)| m as f64 * v.powi(-(ell as i32)))
        .sum();
    Ok(sum / table.sites() as f64)
}

/// Critical hopping weight `γ_c = S₁`.
pub fn gamma_critical(table: &DispersionTable) -> f64 {
    s_ell(table, 1).expect("ell = 1 is valid")
}

/// Order parameter `χ = S₁/√S₂`.
pub fn chi(table: &DispersionTable) -> f64 {
    let s1 = s_ell(table, 1).expect("ell = 1 is valid");
    let s2 = s_ell(table, 2).expect("ell = 2 is valid");
    s1 / s2.sqrt()
}

fn poles_of(params: &SearchParams<'_>) -> Vec<(f64, usize)> {
    params
        .table
        .distinct()
        .iter()
        .map(|&(v, m)| (params.gamma0 * v, m))
        .collect()
}

fn check_pole_distance(poles: &[(f64, usize)], e: f64) -> Result<()> {
    let scale = poles
        .last()
        .map_or(1.0, |&(p, _)| p.abs().max(f64::MIN_POSITIVE));
    for &(p, _) in poles {
        let distance = (p - e).abs();
        if distance <= POLE_GUARD * scale {
            return Err(Error::PoleProximity {
                energy: e,
                distance,
            });
        }
    }
    Ok(())
}

/// `ℱ(E) = (1/N) Σ_k 1/(γ₀ε(k) - E)`.
pub fn transcendental_f(params: &SearchParams<'_>, e: f64) -> Result<f64> {
    let poles = poles_of(params);
    check_pole_distance(&poles, e)?;
    let sum: f64 = poles.iter().map(|&(p, m)| m as f64 / (p - e)).sum();
    Ok(sum / params.table.sites() as f64)
}

/// `ℱ′(E) = (1/N) Σ_k 1/(γ₀ε(k) - E)²`.
pub fn transcendental_f_prime(params: &SearchParams<'_>, e: f64) -> Result<f64> {
    let poles = poles_of(params);
    check_pole_distance(&poles, e)?;
    let sum: f64 = poles
        .iter()
        .map(|&(p, m)| m as f64 / ((p - e) * (p - e)))
        .sum();
    Ok(sum / params.table.sites() as f64)
}

/// `ℱ - 1` and `ℱ′` at `anchor + x`, with pole distances formed as
/// `(p - anchor) - x` so that offsets from a nearby pole keep full precision.
fn secular_at(poles: &[(f64, usize)], inv_n: f64, anchor: f64, x: f64) -> (f64, f64) {
    let (mut f, mut fp) = (0.0, 0.0);
    for &(p, m) in poles {
        let r = 1.0 / ((p - anchor) - x);
        let mr = m as f64 * r;
        f += mr;
        fp += mr * r;
    }
    (f * inv_n - 1.0, fp * inv_n)
}

/// Root of `ℱ = 1` in the bracket `(left, right)`, where `right` is a pole
/// and `left` is either the previous pole or a point with `ℱ < 1`.
fn root_in(poles: &[(f64, usize)], inv_n: f64, left: f64, right: f64) -> Option<(f64, f64)> {
    let length = right - left;
    // decide which end to measure offsets from
    let (g_mid, _) = secular_at(poles, inv_n, left, 0.5 * length);
    let (anchor, mut lo, mut hi) = if g_mid > 0.0 {
        (left, 0.0, 0.5 * length)
    } else {
        (right, -0.5 * length, 0.0)
    };
    if g_mid == 0.0 {
        return Some(finish(poles, inv_n, left, 0.5 * length));
    }
    while hi - lo > BRACKET_REL_WIDTH * length {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (g, _) = secular_at(poles, inv_n, anchor, mid);
        if !g.is_finite() {
            return None;
        }
        if g > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // Newton polish, kept inside the final bracket
    let mut x = 0.5 * (lo + hi);
    for _ in 0..3 {
        let (g, gp) = secular_at(poles, inv_n, anchor, x);
        if g == 0.0 || gp <= 0.0 {
            break;
        }
        let next = x - g / gp;
        if !(next > lo && next < hi) {
            break;
        }
        x = next;
    }
    Some(finish(poles, inv_n, anchor, x))
}

fn finish(poles: &[(f64, usize)], inv_n: f64, anchor: f64, x: f64) -> (f64, f64) {
    let (_, fp) = secular_at(poles, inv_n, anchor, x);
    (anchor + x, 1.0 / fp)
}

/// Solve `ℱ(E) = 1` for all overlap-carrying eigenvalues.
///
/// One root lies in `[-1, 0)` because `ℱ(E) <= 1/|E|` there; one lies
/// strictly between each pair of consecutive distinct poles; none lies
/// above the top pole, where `ℱ < 0`.
pub fn solve_spectrum(params: &SearchParams<'_>) -> Result<SearchSpectrum> {
    let poles = poles_of(params);
    let sites = params.table.sites();
    let inv_n = 1.0 / sites as f64;
    let expected = poles.len();

    let brackets: Vec<(f64, f64)> = std::iter::once((-1.0, 0.0))
        .chain(poles.windows(2).map(|w| (w[0].0, w[1].0)))
        .collect();
    let found: Vec<Option<(f64, f64)>> = brackets
        .par_iter()
        .map(|&(l, r)| root_in(&poles, inv_n, l, r))
        .collect();
    let count = found.iter().filter(|r| r.is_some()).count();
    if count != expected {
        return Err(Error::RootCount {
            expected,
            found: count,
        });
    }
    let (roots, w_sq): (Vec<f64>, Vec<f64>) = found.into_iter().flatten().unzip();

    // interlacing: E₀ < p₀ < E₁ < p₁ < ...
    for (i, &e) in roots.iter().enumerate() {
        let above_prev = i == 0 || e > poles[i - 1].0;
        if !(above_prev && e < poles[i].0) {
            return Err(Error::RootCount { expected, found: i });
        }
    }

    let s_sq = roots
        .iter()
        .zip(&w_sq)
        .map(|(&e, &w)| w * inv_n / (e * e))
        .collect();
    Ok(SearchSpectrum {
        roots,
        w_sq,
        s_sq,
        poles,
        gamma0: params.gamma0,
        sites,
    })
}

/// Transfer amplitude `A(t) = ⟨w|e^{-iHt}|s⟩`.
///
/// Each eigenstate contributes `𝒲_i 𝒮_i^* = -|𝒲_i|²/(√N E_i)`, so
/// `A(t) = -(1/√N) Σ_i |𝒲_i|² e^{-iE_i t}/E_i`: the sign of a term is that
/// of `-E_i`.
pub fn amplitude(spectrum: &SearchSpectrum, t: f64) -> Complex64 {
    let scale = -1.0 / (spectrum.sites as f64).sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for (&e, &w) in spectrum.roots.iter().zip(&spectrum.w_sq) {
        let (s, c) = (e * t).sin_cos();
        acc += Complex64::new(c, -s) * (w / e);
    }
    acc * scale
}

/// Search fidelity `|A(t)|²`.
pub fn fidelity(spectrum: &SearchSpectrum, t: f64) -> f64 {
    amplitude(spectrum, t).norm_sqr()
}

/// First maximum of `|A(t)|²` with the natural period `π√N/χ`.
pub fn search_time(spectrum: &SearchSpectrum) -> Result<(f64, f64)> {
    search_time_with_period(spectrum, spectrum.natural_period())
}

/// First local maximum of `|A(t)|²` for `t > 0`: scan with step
/// `period/400` up to `4·period`, then refine by golden section.
pub fn search_time_with_period(spectrum: &SearchSpectrum, period: f64) -> Result<(f64, f64)> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::domain(
            "search_time",
            format!("scan period {period} must be positive and finite"),
        ));
    }
    let step = period / SCAN_SAMPLES_PER_PERIOD;
    let horizon = SCAN_HORIZON_PERIODS * period;
    let steps = (horizon / step).round() as usize;
    let f = |t: f64| fidelity(spectrum, t);

    let mut prev = f(0.0);
    let mut here = f(step);
    for k in 1..steps {
        let next = f((k + 1) as f64 * step);
        if here > prev && here >= next {
            let (t, v) = golden_max(&f, (k - 1) as f64 * step, (k + 1) as f64 * step);
            return Ok((t, v));
        }
        prev = here;
        here = next;
    }
    Err(Error::NoMaximum { horizon })
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > SEARCH_TIME_TOL * 0.5 * (a + b) {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Two-level approximation
/// `E = γ₀/(2S₂) [γ₀ - S₁ ∓ √((S₁-γ₀)² + 4S₂/N)]`, returned as `(E₀, E₁)`.
pub fn two_level_energies(s1: f64, s2: f64, gamma0: f64, sites: usize) -> Result<(f64, f64)> {
    if !(s2 > 0.0) {
        return Err(Error::domain("two_level_energies", "S2 must be > 0"));
    }
    if gamma0 == 0.0 {
        return Ok((0.0, 0.0));
    }
    let root = ((s1 - gamma0).powi(2) + 4.0 * s2 / sites as f64).sqrt();
    let pre = gamma0 / (2.0 * s2);
    // the root that does not cancel is formed directly; the other follows
    // from E₀E₁ = -γ₀²/(N S₂)
    let product = -gamma0 * gamma0 / (sites as f64 * s2);
    if gamma0 >= s1 {
        let e1 = pre * (gamma0 - s1 + root);
        Ok((product / e1, e1))
    } else {
        let e0 = pre * (gamma0 - s1 - root);
        Ok((e0, product / e0))
    }
}

/// Complete-graph reference: gap `√(4γ₀(1-N) + (γ₀N+1)²)` and `γ_c = 1/N`.
pub fn complete_graph_reference(sites: usize, gamma0: f64) -> Result<(f64, f64)> {
    if sites < 2 {
        return Err(Error::domain("complete_graph_reference", "N must be >= 2"));
    }
    let n = sites as f64;
    let gap = (4.0 * gamma0 * (1.0 - n) + (gamma0 * n + 1.0).powi(2)).sqrt();
    Ok((gap, 1.0 / n))
}

/// Real-space ground state `⟨j|ψ₀⟩ ∝ Σ_k e^{ik·(j-target)}/(γ₀ε(k) - E₀)`,
/// normalised, with a positive amplitude on the target.
pub fn ground_state_profile(
    params: &SearchParams<'_>,
    spectrum: &SearchSpectrum,
) -> Result<Vec<f64>> {
    ground_state_profile_with_cap(params, spectrum, DEFAULT_SITE_CAP)
}

pub fn ground_state_profile_with_cap(
    params: &SearchParams<'_>,
    spectrum: &SearchSpectrum,
    cap: usize,
) -> Result<Vec<f64>> {
    let table = params.table;
    let sites = table.sites();
    if sites > cap {
        return Err(Error::Resource {
            what: "ground-state profile",
            requested: sites,
            cap,
        });
    }
    let e0 = *spectrum.roots.first().ok_or(Error::RootCount {
        expected: 1,
        found: 0,
    })?;
    let spec = table.spec();
    let mut buffer: Vec<Complex64> = table
        .values()
        .iter()
        .map(|&v| Complex64::new(1.0 / (params.gamma0 * v - e0), 0.0))
        .collect();
    // the integrand is even in k, so a forward transform serves as the inverse
    fft_nd(&mut buffer, spec.n(), spec.d());

    let target = spec.coords(params.target);
    let n = spec.n();
    let mut shifted = vec![0usize; spec.d()];
    let mut profile: Vec<f64> = (0..sites)
        .map(|j| {
            for (slot, (&c, &t)) in shifted.iter_mut().zip(spec.coords(j).iter().zip(&target)) {
                *slot = (c + n - t) % n;
            }
            buffer[spec.flat_index(&shifted)].re
        })
        .collect();
    let norm = profile.iter().map(|a| a * a).sum::<f64>().sqrt();
    let sign = if profile[params.target] < 0.0 {
        -1.0
    } else {
        1.0
    };
    for a in profile.iter_mut() {
        *a *= sign / norm;
    }
    Ok(profile)
}

/// Participation ratio `1/Σ_j a_j⁴` of a normalised real state.
pub fn participation_ratio(amplitudes: &[f64]) -> Result<f64> {
    let norm_sq: f64 = amplitudes.iter().map(|a| a * a).sum();
    if (norm_sq - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sq });
    }
    Ok(1.0 / amplitudes.iter().map(|a| a.powi(4)).sum::<f64>())
}
