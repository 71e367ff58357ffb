use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::{digamma_int, gamma_fn};
use crate::{Error, Result};

/// Below this modulus the power series is used; above it the continued
/// fraction. The series loses roughly `e^{|z|}` in relative precision, so
/// the crossover is kept small.
const SERIES_RADIUS: f64 = 2.0;
const MAX_ITER: usize = 20_000;
const EPS: f64 = 1e-16;

/// Generalised exponential integral `E_ν(z) = z^{ν-1} Γ(1-ν, z)` for real
/// order and complex argument (principal branch).
pub fn expint_nu(nu: f64, z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::domain("expint_nu", "z = 0"));
    }
    if !(nu.is_finite() && z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain("expint_nu", "non-finite input"));
    }
    if nu == 0.0 {
        return Ok((-z).exp() / z);
    }
    if z.norm() < SERIES_RADIUS {
        series(nu, z)
    } else {
        continued_fraction(nu, z)
    }
}

/// `𝒦_ν(z) = E_ν(iπz) + E_ν(-iπz) = 2 Re E_ν(iπz)` for real `z > 0`.
pub fn cal_k(nu: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::domain("cal_k", format!("z = {z} must be > 0")));
    }
    Ok(2.0 * expint_nu(nu, Complex64::new(0.0, PI * z))?.re)
}

fn series(nu: f64, z: Complex64) -> Result<Complex64> {
    let is_positive_integer = nu >= 1.0 && nu.fract() == 0.0;
    let n_minus_1 = if is_positive_integer {
        Some(nu as usize - 1)
    } else {
        None
    };

    // Σ (-z)^k / (k! (1 - ν + k)), skipping the resonant k = n-1 term
    let mut power = Complex64::new(1.0, 0.0); // (-z)^k / k!
    let mut sum = Complex64::new(0.0, 0.0);
    let mut resonant = Complex64::new(0.0, 0.0);
    let mut converged = false;
    for k in 0..MAX_ITER {
        if k > 0 {
            power *= -z / k as f64;
        }
        if Some(k) == n_minus_1 {
            resonant = power;
        } else {
            let term = power / (1.0 - nu + k as f64);
            sum += term;
            if k > n_minus_1.unwrap_or(0) && term.norm() <= EPS * sum.norm() {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            function: "expint_nu",
            terms: MAX_ITER,
        });
    }

    match n_minus_1 {
        Some(m) => {
            let psi = digamma_int(m as u32 + 1);
            Ok(resonant * (psi - z.ln()) - sum)
        }
        None => {
            let lead = gamma_fn(1.0 - nu)? * z.powf(nu - 1.0);
            Ok(lead - sum)
        }
    }
}

/// Modified Lentz evaluation of
/// `E_ν(z) = e^{-z} · 1/(z+ν- 1·ν/(z+ν+2- 2(ν+1)/(z+ν+4- ...)))`.
fn continued_fraction(nu: f64, z: Complex64) -> Result<Complex64> {
    let tiny = Complex64::new(1e-300, 0.0);
    let mut b = z + nu;
    let mut c = Complex64::new(1.0 / 1e-300, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        let a = -fi * (nu - 1.0 + fi);
        b += 2.0;
        d = a * d + b;
        if d.norm() < 1e-300 {
            d = tiny;
        }
        d = d.inv();
        c = b + a / c;
        if c.norm() < 1e-300 {
            c = tiny;
        }
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).norm() < EPS {
            return Ok(h * (-z).exp());
        }
    }
    Err(Error::NonConvergence {
        function: "expint_nu",
        terms: MAX_ITER,
    })
}
