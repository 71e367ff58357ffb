use super::SeriesControl;
use crate::{Error, Result};

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// `₁F₂(a; b1, b2; z)` with default truncation control.
pub fn hyp1f2(a: f64, b1: f64, b2: f64, z: f64) -> Result<f64> {
    hyp1f2_with(a, b1, b2, z, &SeriesControl::default())
}

pub fn hyp1f2_with(a: f64, b1: f64, b2: f64, z: f64, control: &SeriesControl) -> Result<f64> {
    hyp1f2_batched(a, b1, b2, z, control, 1)
}

/// Power series for `₁F₂`, testing convergence only at the end of each
/// batch of `batch` terms.
///
/// The series is entire in `z`; consecutive terms obey
/// `t_{k+1} = t_k · (a+k) z / ((b1+k)(b2+k)(k+1))`.
pub fn hyp1f2_batched(
    a: f64,
    b1: f64,
    b2: f64,
    z: f64,
    control: &SeriesControl,
    batch: usize,
) -> Result<f64> {
    if is_nonpositive_integer(b1) || is_nonpositive_integer(b2) {
        return Err(Error::Pole {
            function: "hyp1f2",
            at: if is_nonpositive_integer(b1) { b1 } else { b2 },
        });
    }
    let batch = batch.max(1);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0usize;
    while k < control.max_terms {
        let mut last = term;
        for _ in 0..batch {
            let kf = k as f64;
            term *= (a + kf) * z / ((b1 + kf) * (b2 + kf) * (kf + 1.0));
            sum += term;
            last = term;
            k += 1;
            if term == 0.0 {
                return Ok(sum);
            }
        }
        // the ratio test has to be past its peak before a small term means anything
        let kf = k as f64;
        let ratio = ((a + kf) * z / ((b1 + kf) * (b2 + kf) * (kf + 1.0))).abs();
        if ratio < 1.0 && control.converged(last, sum) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        function: "hyp1f2",
        terms: control.max_terms,
    })
}
