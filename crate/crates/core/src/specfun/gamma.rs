use std::f64::consts::PI;

use crate::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Euler–Mascheroni constant.
pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `sin(πx)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    if x.fract() == 0.0 {
        return 0.0;
    }
    let r = x.rem_euclid(2.0);
    if r <= 0.5 {
        (PI * r).sin()
    } else if r <= 1.5 {
        (PI * (1.0 - r)).sin()
    } else {
        -(PI * (2.0 - r)).sin()
    }
}

/// Gamma function for real arguments.
///
/// Positive integers up to 171 are returned as exact factorial products;
/// everything else goes through the Lanczos approximation, with the
/// reflection formula for `s < 1/2`.
pub fn gamma_fn(s: f64) -> Result<f64> {
    if s.is_nan() {
        return Err(Error::domain("gamma_fn", "NaN argument"));
    }
    if s <= 0.0 && s.fract() == 0.0 {
        return Err(Error::Pole {
            function: "gamma_fn",
            at: s,
        });
    }
    if s.fract() == 0.0 && s <= 171.0 {
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < s {
            acc *= k;
            k += 1.0;
        }
        return Ok(acc);
    }
    Ok(gamma_unchecked(s))
}

fn gamma_unchecked(s: f64) -> f64 {
    if s < 0.5 {
        PI / (sin_pi(s) * gamma_unchecked(1.0 - s))
    } else {
        let x = s - 1.0;
        let mut a = LANCZOS_COEFFS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// Digamma at a positive integer: `ψ(n) = -γ + H_{n-1}`.
pub fn digamma_int(n: u32) -> f64 {
    assert!(n >= 1, "digamma_int requires n >= 1");
    (1..n).rev().map(|k| 1.0 / k as f64).sum::<f64>() - EULER_GAMMA
}
