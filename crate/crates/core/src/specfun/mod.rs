//! Special functions used by the closed-form asymptotics.
//!
//! Everything here is a pure function of its arguments. The working
//! precision target is `1e-10` relative; most routines do considerably
//! better away from their singular points.

mod expint;
mod gamma;
mod hypergeometric;
mod zeta;

pub use expint::{cal_k, expint_nu};
pub use gamma::{digamma_int, gamma_fn, sin_pi};
pub use hypergeometric::{hyp1f2, hyp1f2_batched, hyp1f2_with};
pub use zeta::{
    generalized_harmonic, hurwitz_zeta, hurwitz_zeta_asymptotic, riemann_zeta,
    zeta_reflection_factor, zeta_reflection_factor_direct,
};

/// Truncation control for power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl SeriesControl {
    pub fn new(max_terms: usize, abs_tol: f64, rel_tol: f64) -> crate::Result<Self> {
        if max_terms == 0 {
            return Err(crate::Error::domain(
                "SeriesControl",
                "max_terms must be >= 1",
            ));
        }
        if !(abs_tol >= 0.0 && rel_tol >= 0.0) || (abs_tol == 0.0 && rel_tol == 0.0) {
            return Err(crate::Error::domain(
                "SeriesControl",
                "tolerances must be non-negative and at least one positive",
            ));
        }
        Ok(Self {
            max_terms,
            abs_tol,
            rel_tol,
        })
    }

    /// True once `term` is negligible against the running `sum`.
    pub(crate) fn converged(&self, term: f64, sum: f64) -> bool {
        let t = term.abs();
        t <= self.abs_tol || t <= self.rel_tol * sum.abs()
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            max_terms: 1000,
            abs_tol: 1e-300,
            rel_tol: 1e-17,
        }
    }
}
