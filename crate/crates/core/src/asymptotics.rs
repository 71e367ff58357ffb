//! Closed-form large-`N` predictions: regime classification, the gap
//! constants `𝒞₁`/`𝒞₂`, the unscaled `δ`, `ε(k_max)` and `κ₀`, the spectral
//! dimension, the continuum dispersion laws and the `χ` asymptote.
//!
//! Sign convention. The tabulated expressions are written for
//! `ℰ(k) = Σ cos(k·j)/‖j‖^α − ε₀`, which is non-positive once `ε₀ = κ₀`.
//! This module reports everything in the crate's positive-semidefinite
//! convention `ε(k) = κ₀ − Σ cos(k·j)/‖j‖^α`, i.e. `δ = −δ_table` and
//! `ε(k_max) = κ₀ − (constant part of the table row)`. All asymptotic
//! statements refer to the Manhattan norm.

use std::f64::consts::PI;

use crate::specfun::{cal_k, gamma_fn, hyp1f2, riemann_zeta, sin_pi, zeta_reflection_factor};
use crate::{Error, Result};

/// Half-width of the symmetric window used by [`LimitPolicy::Average`].
pub const LIMIT_OFFSET: f64 = 1e-6;

/// Node spacing used to interpolate the gap constants across their
/// removable points. Near such a point the individual terms grow like
/// `1/h` and cancel, so direct evaluation loses about `ε_mach/h²` absolute
/// accuracy; nodes at `m ± h` and `m ± 2h` keep both that loss and the
/// interpolation error near `1e-10`.
pub const REMOVABLE_STEP: f64 = 1e-3;

/// Number of terms kept in the one-dimensional `δ` correction series; the
/// first neglected term is `O(N^{-8})`.
pub const D1_CORRECTION_TERMS: u32 = 3;

/// The three scaling regimes of the spectral gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeKind {
    /// `α < d`: the gap tends to an `N`-independent constant.
    MimicsComplete,
    /// `d < α < d+2`: `Δ ∼ N^{1-α/d}`.
    Intermediate,
    /// `α ≥ d+2`: nearest-neighbour-like `Δ ∼ N^{-2/d}`.
    ShortRange,
}

impl RegimeKind {
    pub fn name(self) -> &'static str {
        match self {
            RegimeKind::MimicsComplete => "mimics-complete",
            RegimeKind::Intermediate => "intermediate",
            RegimeKind::ShortRange => "short-range",
        }
    }
}

/// Scaling regime together with whether a Grover-optimal search is
/// attainable (`α < 3d/2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Regime {
    pub kind: RegimeKind,
    pub optimal: bool,
}

/// Predicted scaling of the rescaled gap `Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticGap {
    pub regime: Regime,
    /// Exponent of `N`: `0`, `1 − α/d` or `−2/d`.
    pub exponent: f64,
    /// `𝒞₁` or `𝒞₂`; absent in the short-range regime.
    pub constant: Option<f64>,
    /// Predicted `Δ` whenever a constant is available.
    pub predicted: Option<f64>,
    /// True when the constant was obtained as a limit around a removable point.
    pub limit_evaluated: bool,
}

/// How excluded exponents are treated by [`unscaled_asymptotics_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LimitPolicy {
    /// Return an out-of-regime error.
    #[default]
    Reject,
    /// Average the two evaluations at `α ± LIMIT_OFFSET` and flag the result.
    Average,
}

/// Leading-order `δ`, `ε(k_max)` and `κ₀` in the positive convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnscaledAsymptotics {
    pub delta: f64,
    pub e_kmax: f64,
    pub kappa0: f64,
    pub limit_evaluated: bool,
}

fn check_dim(function: &'static str, d: usize) -> Result<()> {
    if (1..=4).contains(&d) {
        Ok(())
    } else {
        Err(Error::domain(function, format!("d = {d} must be in 1..=4")))
    }
}

fn check_alpha(function: &'static str, alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            function,
            format!("alpha = {alpha} must be finite and >= 0"),
        ))
    }
}

fn is_integer_near(alpha: f64, m: f64) -> bool {
    (alpha - m).abs() < LIMIT_OFFSET
}

/// Classify `(d, α)` into its gap-scaling regime.
pub fn classify(d: usize, alpha: f64) -> Result<Regime> {
    check_dim("classify", d)?;
    check_alpha("classify", alpha)?;
    let df = d as f64;
    if alpha == df || alpha == df + 2.0 {
        return Err(Error::OutOfRegime {
            d,
            alpha,
            detail: "regime boundary",
        });
    }
    let kind = if alpha < df {
        RegimeKind::MimicsComplete
    } else if alpha < df + 2.0 {
        RegimeKind::Intermediate
    } else {
        RegimeKind::ShortRange
    };
    Ok(Regime {
        kind,
        optimal: alpha < 1.5 * df,
    })
}

/// Evaluates `f` at `alpha`, or, within `2·REMOVABLE_STEP` of one of the
/// removable `points`, by cubic interpolation through the nodes
/// `m ± REMOVABLE_STEP`, `m ± 2·REMOVABLE_STEP`.
fn with_limits(alpha: f64, points: &[f64], f: impl Fn(f64) -> Result<f64>) -> Result<(f64, bool)> {
    let h = REMOVABLE_STEP;
    match points.iter().find(|&&m| (alpha - m).abs() < 2.0 * h) {
        Some(&m) => {
            let nodes = [m - 2.0 * h, m - h, m + h, m + 2.0 * h];
            let mut value = 0.0;
            for (i, &xi) in nodes.iter().enumerate() {
                let weight: f64 = nodes
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &xj)| (alpha - xj) / (xi - xj))
                    .product();
                value += weight * f(xi)?;
            }
            Ok((value, true))
        }
        None => Ok((f(alpha)?, false)),
    }
}

fn kk(nu: f64, z: f64) -> Result<f64> {
    cal_k(nu, z)
}

/// `₁F₂((d−α)/2; 1/2, (d+2−α)/2; −π²/4)`, shared by all `d ≥ 2` rows.
fn hyp_row(d: usize, a: f64) -> Result<f64> {
    let df = d as f64;
    hyp1f2((df - a) / 2.0, 0.5, (df + 2.0 - a) / 2.0, -PI * PI / 4.0)
}

fn c1_raw(d: usize, a: f64) -> Result<f64> {
    let p2 = |x: f64| 2f64.powf(x);
    let p3 = |x: f64| 3f64.powf(x);
    match d {
        1 => Ok((1.0 - a) * zeta_reflection_factor(a)? / p2(a)),
        2 => {
            let f = hyp_row(2, a)?;
            Ok(
                f / (2.0 - p2(2.0 - a)) - (a - 2.0) * kk(a - 1.0, 2.0)? / (2.0 - p2(a))
                    + (a - 2.0) * kk(a - 1.0, 1.0)? / (p2(3.0 - a) - 4.0),
            )
        }
        3 => {
            let f = hyp_row(3, a)?;
            let ks = p2(a + 1.0) * kk(a - 2.0, 1.0)?
                - 8.0 * kk(a - 2.0, 2.0)?
                - p2(a) * p3(3.0 - a) * kk(a - 2.0, 3.0)?;
            Ok(f / (3.0 * (p3(2.0 - a) - p2(3.0 - a) + 1.0))
                - (a - 3.0) * ks / (6.0 * (p3(2.0 - a) * p2(a) + p2(a) - 8.0)))
        }
        4 => {
            let f = hyp_row(4, a)?;
            let base = -3.0 * p2(a + 3.0) + 4f64.powf(a) - 64.0;
            let denom = 8.0 * (base + p3(4.0 - a) * 4f64.powf(a));
            Ok(0.25 * f / (base * 4f64.powf(-a) + p3(4.0 - a))
                - 3.0
                    * 4f64.powf(a)
                    * (a - 4.0)
                    * (kk(a - 3.0, 1.0)? - 54.0 * p3(-a) * kk(a - 3.0, 3.0)?)
                    / denom
                + 256.0 * (a - 4.0) * kk(a - 3.0, 4.0)? / denom)
        }
        _ => unreachable!("dimension checked by caller"),
    }
}

fn c2_raw(d: usize, a: f64) -> Result<f64> {
    let p2 = |x: f64| 2f64.powf(x);
    let p3 = |x: f64| 3f64.powf(x);
    let z = riemann_zeta;
    match d {
        1 => {
            let h = (p2(2.0 - a) - 4.0) * z(a)?;
            Ok((zeta_reflection_factor(a)? * (a - 1.0) + p2(a)) / (h * (a - 1.0)))
        }
        2 => {
            let f = (p2(4.0 - a) - 8.0) * z(a - 1.0)?;
            let q = (a - 2.0) * (a - 1.0);
            let bracket = (p2(a + 1.0) - 4.0) / q
                - (2.0 * kk(a - 1.0, 2.0)? - p2(a - 1.0) * kk(a - 1.0, 1.0)?) / (a - 1.0)
                - p2(a) * hyp_row(2, a)? / q;
            Ok(bracket / f)
        }
        3 => {
            let g = (p2(5.0 - a) - 8.0) * z(a - 2.0)? + (p2(2.0 - a) - 4.0) * z(a)?;
            let q2 = (a - 2.0) * (a - 1.0);
            let q3 = (a - 3.0) * q2;
            let bracket = -p2(a) * hyp_row(3, a)? / q3
                + (p2(a) * kk(a - 2.0, 1.0)?
                    - 4.0 * kk(a - 2.0, 2.0)?
                    - p2(a - 1.0) * p3(3.0 - a) * kk(a - 2.0, 3.0)?)
                    / q2
                + p3(1.0 - a) * (9.0 * p2(a) - 8.0 * p3(a) + 6f64.powf(a)) / q3;
            Ok(bracket / g)
        }
        4 => {
            let j = -p2(4.0 - a) / 3.0
                * ((p2(a) - 8.0) * z(a - 3.0)? + 2.0 * (p2(a) - 2.0) * z(a - 1.0)?);
            let q3 = (a - 3.0) * (a - 2.0) * (a - 1.0);
            let q4 = (a - 4.0) * q3;
            let bracket = -p2(a) * hyp_row(4, a)? / q4 + 3.0 * p2(a - 1.0) * kk(a - 3.0, 1.0)? / q3
                - 6f64.powf(-a)
                    * (81.0 * 4f64.powf(a) * kk(a - 3.0, 3.0)? + 128.0 * p3(a) * kk(a - 3.0, 4.0)?)
                    / q3
                + 4.0 * (-p2(6.0 - a) + p2(a) + p2(a) * p3(4.0 - a) - 24.0) / q4;
            Ok(bracket / j)
        }
        _ => unreachable!("dimension checked by caller"),
    }
}

/// Integer exponents inside `[0, d)` where the `𝒞₁` expression is 0/0.
fn c1_removable(d: usize) -> Vec<f64> {
    (1..d).map(|m| m as f64).collect()
}

fn const_c1_flagged(d: usize, alpha: f64) -> Result<(f64, bool)> {
    check_dim("const_c1", d)?;
    check_alpha("const_c1", alpha)?;
    if alpha >= d as f64 {
        return Err(Error::OutOfRegime {
            d,
            alpha,
            detail: "C1 requires 0 <= alpha < d",
        });
    }
    with_limits(alpha, &c1_removable(d), |a| c1_raw(d, a))
}

fn const_c2_flagged(d: usize, alpha: f64) -> Result<(f64, bool)> {
    check_dim("const_c2", d)?;
    let df = d as f64;
    if !(alpha > df && alpha < df + 2.0) {
        return Err(Error::OutOfRegime {
            d,
            alpha,
            detail: "C2 requires d < alpha < d+2",
        });
    }
    // The only interior removable point (d = 1, α = 2) is lifted by the
    // zeta functional equation inside `zeta_reflection_factor`.
    Ok((c2_raw(d, alpha)?, false))
}

/// `𝒞₁^{(d)}(α)` for `0 ≤ α < d`, so that `Δ → 1 − 𝒞₁`.
///
/// Integer `α` inside the range, where the expression is 0/0, is evaluated
/// as the symmetric limit.
pub fn const_c1(d: usize, alpha: f64) -> Result<f64> {
    Ok(const_c1_flagged(d, alpha)?.0)
}

/// `𝒞₂^{(d)}(α)` for `d < α < d+2`, so that `Δ ≈ 𝒞₂ N^{1-α/d}`.
pub fn const_c2(d: usize, alpha: f64) -> Result<f64> {
    Ok(const_c2_flagged(d, alpha)?.0)
}

/// Predicted scaling of the rescaled gap for `N` sites (real-valued `N`
/// allowed for continuous plotting).
pub fn gap_asymptotic(d: usize, alpha: f64, sites: f64) -> Result<AsymptoticGap> {
    let regime = classify(d, alpha)?;
    if !(sites >= 1.0 && sites.is_finite()) {
        return Err(Error::domain(
            "gap_asymptotic",
            format!("N = {sites} must be >= 1"),
        ));
    }
    let df = d as f64;
    let (exponent, constant) = match regime.kind {
        RegimeKind::MimicsComplete => (0.0, Some(const_c1_flagged(d, alpha)?)),
        RegimeKind::Intermediate => (1.0 - alpha / df, Some(const_c2_flagged(d, alpha)?)),
        RegimeKind::ShortRange => (-2.0 / df, None),
    };
    let predicted = constant.map(|(c, _)| match regime.kind {
        RegimeKind::MimicsComplete => 1.0 - c,
        _ => c * sites.powf(exponent),
    });
    Ok(AsymptoticGap {
        regime,
        exponent,
        constant: constant.map(|(c, _)| c),
        predicted,
        limit_evaluated: constant.is_some_and(|(_, flag)| flag),
    })
}

/// Fits the short-range constant `𝒞₃` in `Δ ≈ 𝒞₃ N^{-2/d}` from exact
/// `(N, Δ)` samples (geometric mean of `Δ N^{2/d}`).
pub fn fit_short_range_constant(d: usize, samples: &[(f64, f64)]) -> Result<f64> {
    check_dim("fit_short_range_constant", d)?;
    if samples.is_empty() {
        return Err(Error::InsufficientPoints {
            found: 0,
            required: 1,
        });
    }
    let mut acc = 0.0;
    for &(n, gap) in samples {
        if !(n > 0.0 && gap > 0.0) {
            return Err(Error::domain(
                "fit_short_range_constant",
                format!("sample ({n}, {gap}) is not positive"),
            ));
        }
        acc += gap.ln() + 2.0 / d as f64 * n.ln();
    }
    Ok((acc / samples.len() as f64).exp())
}

/// The three pieces of a table row in its own sign convention: `κ₀`,
/// the part of `δ` that follows `−κ₀`, and the constant in `ℰ(k_max)`.
fn table_row(d: usize, a: f64, sites: f64) -> Result<(f64, f64, f64)> {
    let p2 = |x: f64| 2f64.powf(x);
    let p3 = |x: f64| 3f64.powf(x);
    let z = riemann_zeta;
    let scale = sites.powf(1.0 - a / d as f64);
    match d {
        1 => {
            let kappa0 = 2.0 * z(a)? - p2(a) / (a - 1.0) * scale;
            let mut correction = 0.0;
            for j in 1..=D1_CORRECTION_TERMS {
                let two_j = 2.0 * j as f64;
                // (2πi)^{2j} = (−1)^j (2π)^{2j}
                let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
                correction += z(a - two_j)? * sign * (2.0 * PI).powf(two_j)
                    / gamma_fn(two_j + 1.0)?
                    * sites.powf(-two_j);
            }
            let rest = 2.0 * z(a)? + zeta_reflection_factor(a)? * scale + 2.0 * correction;
            let e_const = (p2(2.0 - a) - 2.0) * z(a)?;
            Ok((kappa0, rest, e_const))
        }
        2 => {
            let q = (a - 2.0) * (a - 1.0);
            let kappa0 = 4.0 * z(a - 1.0)? + (4.0 - p2(a + 1.0)) / q * scale;
            let bracket = p2(a) * hyp_row(2, a)? / q
                + (2.0 * kk(a - 1.0, 2.0)? - p2(a - 1.0) * kk(a - 1.0, 1.0)?) / (a - 1.0);
            let rest = 4.0 * z(a - 1.0)? - bracket * scale;
            let e_const = (p2(4.0 - a) - 4.0) * z(a - 1.0)?;
            Ok((kappa0, rest, e_const))
        }
        3 => {
            let q2 = (a - 2.0) * (a - 1.0);
            let q3 = (a - 3.0) * q2;
            let lead = 4.0 * z(a - 2.0)? + 2.0 * z(a)?;
            let kappa0 =
                lead - p3(1.0 - a) * (9.0 * p2(a) - 8.0 * p3(a) + 6f64.powf(a)) / q3 * scale;
            let bracket = -p2(a) * hyp_row(3, a)? / q3
                + (p2(a) * kk(a - 2.0, 1.0)?
                    - 4.0 * kk(a - 2.0, 2.0)?
                    - p2(a - 1.0) * p3(3.0 - a) * kk(a - 2.0, 3.0)?)
                    / q2;
            let rest = lead + bracket * scale;
            let e_const = (p2(5.0 - a) - 4.0) * z(a - 2.0)? + (p2(2.0 - a) - 2.0) * z(a)?;
            Ok((kappa0, rest, e_const))
        }
        4 => {
            let q3 = (a - 3.0) * (a - 2.0) * (a - 1.0);
            let q4 = (a - 4.0) * q3;
            let lead = 8.0 / 3.0 * z(a - 3.0)? + 16.0 / 3.0 * z(a - 1.0)?;
            let kappa0 =
                lead - 4.0 * (-p2(6.0 - a) + p2(a) + p2(a) * p3(4.0 - a) - 24.0) / q4 * scale;
            let bracket = p2(a) * hyp_row(4, a)? / q4
                - (3.0 * p2(a - 1.0) * kk(a - 3.0, 1.0)?
                    - p2(a) * p3(4.0 - a) * kk(a - 3.0, 3.0)?
                    - p2(7.0 - a) * kk(a - 3.0, 4.0)?)
                    / q3;
            let rest = lead - bracket * scale;
            let e_const =
                (p2(7.0 - a) - 8.0) / 3.0 * z(a - 3.0)? + (p2(6.0 - a) - 16.0) / 3.0 * z(a - 1.0)?;
            Ok((kappa0, rest, e_const))
        }
        _ => unreachable!("dimension checked by caller"),
    }
}

fn unscaled_raw(d: usize, a: f64, sites: f64) -> Result<UnscaledAsymptotics> {
    let (kappa0, rest, e_const) = table_row(d, a, sites)?;
    Ok(UnscaledAsymptotics {
        delta: kappa0 - rest,
        e_kmax: kappa0 - e_const,
        kappa0,
        limit_evaluated: false,
    })
}

/// Leading-order `δ`, `ε(k_max)` and `κ₀` for `0 ≤ α < d+2`, rejecting the
/// excluded integers `α ∈ {1, ..., d}`.
pub fn unscaled_asymptotics(d: usize, alpha: f64, sites: f64) -> Result<UnscaledAsymptotics> {
    unscaled_asymptotics_with(d, alpha, sites, LimitPolicy::Reject)
}

pub fn unscaled_asymptotics_with(
    d: usize,
    alpha: f64,
    sites: f64,
    policy: LimitPolicy,
) -> Result<UnscaledAsymptotics> {
    check_dim("unscaled_asymptotics", d)?;
    check_alpha("unscaled_asymptotics", alpha)?;
    if !(sites >= 1.0 && sites.is_finite()) {
        return Err(Error::domain(
            "unscaled_asymptotics",
            format!("N = {sites} must be >= 1"),
        ));
    }
    if alpha >= d as f64 + 2.0 {
        return Err(Error::OutOfRegime {
            d,
            alpha,
            detail: "tabulated asymptotics require alpha < d+2",
        });
    }
    let excluded = (1..=d)
        .map(|m| m as f64)
        .find(|&m| is_integer_near(alpha, m));
    match (excluded, policy) {
        (None, _) => unscaled_raw(d, alpha, sites),
        (Some(_), LimitPolicy::Reject) => Err(Error::OutOfRegime {
            d,
            alpha,
            detail: "excluded integer exponent",
        }),
        (Some(m), LimitPolicy::Average) => {
            let lo = unscaled_raw(d, m - LIMIT_OFFSET, sites)?;
            let hi = unscaled_raw(d, m + LIMIT_OFFSET, sites)?;
            Ok(UnscaledAsymptotics {
                delta: 0.5 * (lo.delta + hi.delta),
                e_kmax: 0.5 * (lo.e_kmax + hi.e_kmax),
                kappa0: 0.5 * (lo.kappa0 + hi.kappa0),
                limit_evaluated: true,
            })
        }
    }
}

/// Spectral dimension `d_s = 2d/(α−d)` for `d < α < d+2`.
pub fn spectral_dimension(d: usize, alpha: f64) -> Result<f64> {
    check_dim("spectral_dimension", d)?;
    let df = d as f64;
    if !(alpha > df && alpha < df + 2.0) {
        return Err(Error::OutOfRegime {
            d,
            alpha,
            detail: "spectral dimension requires d < alpha < d+2",
        });
    }
    Ok(2.0 * df / (alpha - df))
}

/// Thermodynamic-limit order parameter `χ`: `1` for `α ≤ d`,
/// `√(3−2α/d)/(2−α/d)` for `d < α < 3d/2` and `0` beyond.
///
/// The continuum prefactor `c_d` is normalised to one so that `χ` is
/// continuous at `α = d`.
pub fn chi_asymptotic(d: usize, alpha: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::domain("chi_asymptotic", "d must be >= 1"));
    }
    check_alpha("chi_asymptotic", alpha)?;
    let x = alpha / d as f64;
    Ok(if x <= 1.0 {
        1.0
    } else if x < 1.5 {
        (3.0 - 2.0 * x).sqrt() / (2.0 - x)
    } else {
        0.0
    })
}

/// Leading small-`k` form of the dispersion: `c·k^{α−d}` for
/// `d < α < d+2` and `c·k²` for `α > d+2`.
///
/// The prefactors are the magnitudes of the continuum integrals over
/// `‖j‖ ≥ 1`; their signs depend on the orientation of the dispersion and
/// are dropped so the result is non-negative like `ε`.
pub fn continuum_dispersion(d: usize, alpha: f64, k: f64) -> Result<f64> {
    check_dim("continuum_dispersion", d)?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::domain(
            "continuum_dispersion",
            format!("k = {k} must be > 0"),
        ));
    }
    let df = d as f64;
    let a = alpha;
    if !(a > df) || a == df + 2.0 || !a.is_finite() {
        return Err(Error::OutOfRegime {
            d,
            alpha,
            detail: "continuum dispersion requires alpha in (d, d+2) or alpha > d+2",
        });
    }
    if a > df + 2.0 {
        let c = match d {
            1 => 1.0 / (2.0 * (a - 3.0)),
            2 => PI / (8.0 * (a - 4.0)),
            3 => PI / (3.0 * (a - 5.0)),
            _ => PI * PI / (4.0 * (a - 6.0)),
        };
        return Ok(c.abs() * k * k);
    }
    let c = match d {
        // sin(πα/2) Γ(1−α) = π / (2 cos(πα/2) Γ(α)), regular at α = 2
        1 => PI / (2.0 * sin_pi(a / 2.0 + 0.5) * gamma_fn(a)?),
        2 => 2f64.powf(-a - 1.0) * PI * a * gamma_fn(-a / 2.0)? / gamma_fn(a / 2.0)?,
        // 2π sin(πα/2) Γ(2−α) = −π² / (cos(πα/2) Γ(α−1)), regular at α = 4
        3 => -PI * PI / (sin_pi(a / 2.0 + 0.5) * gamma_fn(a - 1.0)?),
        _ => PI * PI * 2f64.powf(4.0 - a) * gamma_fn(2.0 - a / 2.0)? / gamma_fn(a / 2.0)?,
    };
    Ok(c.abs() * k.powf(a - df))
}

/// Continuum estimate of `S_ℓ` up to the shared prefactor:
/// `1/(d + ℓ(d−α))`, divergent unless the denominator is positive.
pub fn s_ell_continuum(d: usize, alpha: f64, ell: u32) -> Result<f64> {
    if d == 0 {
        return Err(Error::domain("s_ell_continuum", "d must be >= 1"));
    }
    if ell == 0 {
        return Err(Error::domain("s_ell_continuum", "ell must be >= 1"));
    }
    let df = d as f64;
    let denom = df + ell as f64 * (df - alpha);
    if !(denom > 0.0) {
        return Err(Error::OutOfRegime {
            d,
            alpha,
            detail: "continuum S_ell diverges (d + ell(d - alpha) <= 0)",
        });
    }
    Ok(1.0 / denom)
}
