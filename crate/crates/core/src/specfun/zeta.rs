use std::f64::consts::PI;

use super::gamma::{gamma_fn, sin_pi};
use crate::{Error, Result};

/// `B_{2j} / (2j)!` for `j = 1..=6`.
const BERNOULLI_OVER_FACTORIAL: [f64; 6] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
];

const POLE_GUARD: f64 = 1e-12;

fn check_pole(function: &'static str, eta: f64) -> Result<()> {
    if (eta - 1.0).abs() < POLE_GUARD {
        Err(Error::Pole { function, at: eta })
    } else {
        Ok(())
    }
}

/// Riemann zeta function for real `s ≠ 1`.
///
/// Negative arguments go through the functional equation so that the
/// Euler–Maclaurin sum only ever sees `s >= 0`.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    check_pole("riemann_zeta", s)?;
    if s.is_nan() {
        return Err(Error::domain("riemann_zeta", "NaN argument"));
    }
    if s >= 0.0 {
        return Ok(euler_maclaurin(s, 1.0));
    }
    // trivial zeros
    if s.fract() == 0.0 && (s / 2.0).fract() == 0.0 {
        return Ok(0.0);
    }
    let reflected = euler_maclaurin(1.0 - s, 1.0);
    Ok(2f64.powf(s) * PI.powf(s - 1.0) * sin_pi(s / 2.0) * gamma_fn(1.0 - s)? * reflected)
}

/// Hurwitz zeta function `ζ(η, x) = Σ_{k≥0} (k + x)^{-η}`, analytically
/// continued to all real `η ≠ 1`.
pub fn hurwitz_zeta(eta: f64, x: f64) -> Result<f64> {
    check_pole("hurwitz_zeta", eta)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "hurwitz_zeta",
            format!("x = {x} must be > 0"),
        ));
    }
    if eta.is_nan() {
        return Err(Error::domain("hurwitz_zeta", "NaN order"));
    }
    Ok(euler_maclaurin(eta, x))
}

/// Euler–Maclaurin summation with Bernoulli corrections through `B_12`.
///
/// The first `m` terms are summed directly so that the tail starts at
/// `a = x + m >= shift`. For `η < 1` the direct terms grow with `k` and
/// cancel against the integral term, so the shift is kept small there; for
/// negative `η` the result is then accurate to about `1e-12` absolute even
/// where the value itself nearly vanishes.
fn euler_maclaurin(eta: f64, x: f64) -> f64 {
    let shift = if eta < 0.0 {
        6.0
    } else if eta < 1.0 {
        10.0
    } else {
        (30.0f64).max(1.5 * eta)
    };
    let m = if x < shift {
        (shift - x).ceil() as usize
    } else {
        0
    };

    let mut head = 0.0;
    for k in (0..m).rev() {
        head += (x + k as f64).powf(-eta);
    }

    let a = x + m as f64;
    let a_pow = a.powf(-eta);
    let mut tail = a * a_pow / (eta - 1.0) + 0.5 * a_pow;

    // rising factorial (η)_{2j-1} times a^{-η-2j+1}
    let inv_a2 = 1.0 / (a * a);
    let mut poch = eta;
    let mut power = a_pow / a;
    for (j, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if j > 0 {
            let base = eta + (2 * j) as f64;
            poch *= (base - 1.0) * base;
            power *= inv_a2;
        }
        tail += coeff * poch * power;
    }
    head + tail
}

/// Two-term large-`x` expansion `x^{-η}/2 + x^{1-η}/(η-1)`.
///
/// Truncation error is `O(x^{-1-η})`.
pub fn hurwitz_zeta_asymptotic(eta: f64, x: f64) -> Result<f64> {
    check_pole("hurwitz_zeta_asymptotic", eta)?;
    if !(x > 0.0) {
        return Err(Error::domain(
            "hurwitz_zeta_asymptotic",
            format!("x = {x} must be > 0"),
        ));
    }
    Ok(0.5 * x.powf(-eta) + x.powf(1.0 - eta) / (eta - 1.0))
}

/// Generalised harmonic number `H_m^{(r)} = Σ_{i=1}^m i^{-r}`.
pub fn generalized_harmonic(m: u64, r: f64) -> f64 {
    (1..=m).rev().map(|i| (i as f64).powf(-r)).sum()
}

/// `2^α π^{α-1} sin(πα/2) Γ(1-α)` evaluated literally.
///
/// Singular (0·∞) at even integers `α >= 2`; see [`zeta_reflection_factor`].
pub fn zeta_reflection_factor_direct(alpha: f64) -> Result<f64> {
    let g = gamma_fn(1.0 - alpha)?;
    Ok(2f64.powf(alpha) * PI.powf(alpha - 1.0) * sin_pi(alpha / 2.0) * g)
}

/// `2^α π^{α-1} sin(πα/2) Γ(1-α)` with its removable singularities lifted.
///
/// For `α > 1` the functional equation gives the product as
/// `ζ(α)/ζ(1-α)`, which is regular at `α = 2, 4, ...`. Below one the
/// literal product has no removable points and is used as is.
pub fn zeta_reflection_factor(alpha: f64) -> Result<f64> {
    check_pole("zeta_reflection_factor", alpha)?;
    if alpha > 1.0 {
        let denom = riemann_zeta(1.0 - alpha)?;
        if denom == 0.0 {
            return Err(Error::Pole {
                function: "zeta_reflection_factor",
                at: alpha,
            });
        }
        Ok(riemann_zeta(alpha)? / denom)
    } else {
        zeta_reflection_factor_direct(alpha)
    }
}
