//! Periodic hypercubic lattice with power-law couplings and its Laplacian
//! dispersion over the Brillouin zone.
//!
//! Conventions: momentum grid points are labelled by `m ∈ {0..n}^d` with
//! `k = 2π m / n`, stored row-major (last axis fastest). A grid index `m`
//! on one axis stands for the displacement `j = m` if `m <= n/2` and
//! `j = m - n` otherwise, i.e. the window `{-n/2+1, ..., n/2}`. The
//! dispersion is the positive-semidefinite
//! `ε(k) = κ₀ - Σ_{j≠0} cos(k·j) / ‖j‖^α` with `ε(0) = 0`.

use std::cmp::Ordering;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::fit::linear_fit;
use crate::specfun::generalized_harmonic;
use crate::{Error, Result};

/// Default cap on the number of lattice sites in a dispersion table.
pub const DEFAULT_SITE_CAP: usize = 1 << 22;

/// Relative tolerance used to merge numerically degenerate levels.
pub const GROUPING_TOLERANCE: f64 = 1e-9;

/// Distance used to measure `‖j‖` in the coupling `1/‖j‖^α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Norm {
    #[default]
    Euclidean,
    Manhattan,
}

impl Norm {
    pub fn name(self) -> &'static str {
        match self {
            Norm::Euclidean => "euclidean",
            Norm::Manhattan => "manhattan",
        }
    }

    /// `‖j‖` for an integer displacement.
    pub fn length(self, j: &[i64]) -> f64 {
        match self {
            Norm::Euclidean => (j.iter().map(|&x| (x * x) as f64).sum::<f64>()).sqrt(),
            Norm::Manhattan => j.iter().map(|&x| x.unsigned_abs() as f64).sum(),
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "l2" => Ok(Norm::Euclidean),
            "manhattan" | "l1" => Ok(Norm::Manhattan),
            other => Err(Error::InvalidSpec(format!("unknown norm '{other}'"))),
        }
    }
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A `d`-dimensional periodic lattice of linear size `n` with hopping
/// `1/‖j‖^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    d: usize,
    n: usize,
    alpha: f64,
    norm: Norm,
    sites: usize,
}

impl LatticeSpec {
    pub fn new(d: usize, n: usize, alpha: f64, norm: Norm) -> Result<Self> {
        if !(1..=4).contains(&d) {
            return Err(Error::InvalidSpec(format!("d = {d} must be in 1..=4")));
        }
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidSpec(format!("n = {n} must be even and >= 4")));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "alpha = {alpha} must be finite and >= 0"
            )));
        }
        let sites = n
            .checked_pow(d as u32)
            .ok_or_else(|| Error::InvalidSpec(format!("n^d = {n}^{d} overflows")))?;
        Ok(Self {
            d,
            n,
            alpha,
            norm,
            sites,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    /// Number of sites `N = n^d`.
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Same lattice with a different exponent.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.d, self.n, alpha, self.norm)
    }

    /// Signed displacement represented by grid index `m` on one axis.
    pub fn displacement(&self, m: usize) -> i64 {
        if m <= self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    /// Grid coordinates of a row-major flat index.
    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.d];
        for slot in out.iter_mut().rev() {
            *slot = index % self.n;
            index /= self.n;
        }
        out
    }

    /// Row-major flat index of grid coordinates (each reduced mod `n`).
    pub fn flat_index(&self, coords: &[usize]) -> usize {
        coords.iter().fold(0, |acc, &m| acc * self.n + m % self.n)
    }

    /// Coupling `1/‖j‖^α` for a displacement inside the fundamental window.
    pub fn coupling(&self, j: &[i64]) -> Result<f64> {
        if j.len() != self.d {
            return Err(Error::InvalidSpec(format!(
                "displacement has {} components, lattice has d = {}",
                j.len(),
                self.d
            )));
        }
        let half = (self.n / 2) as i64;
        if let Some(&bad) = j.iter().find(|&&x| x <= -half || x > half) {
            return Err(Error::InvalidSpec(format!(
                "displacement component {bad} outside the window {}..={half}",
                1 - half
            )));
        }
        if j.iter().all(|&x| x == 0) {
            return Err(Error::InvalidSpec(
                "zero displacement has no coupling".into(),
            ));
        }
        Ok(self.coupling_unchecked(j))
    }

    pub(crate) fn coupling_unchecked(&self, j: &[i64]) -> f64 {
        self.norm.length(j).powf(-self.alpha)
    }

    /// Coupling between the sites at flat indices `a` and `b`.
    pub fn coupling_between(&self, a: usize, b: usize) -> Option<f64> {
        if a == b {
            return None;
        }
        let (ca, cb) = (self.coords(a), self.coords(b));
        let j: Vec<i64> = ca
            .iter()
            .zip(&cb)
            .map(|(&x, &y)| self.displacement((y + self.n - x) % self.n))
            .collect();
        Some(self.coupling_unchecked(&j))
    }

    /// Index of the point-group representative of grid point `index`:
    /// each coordinate folded to `min(m, n-m)` and the coordinates sorted.
    /// Couplings and dispersion are constant on these orbits.
    pub fn canonical_index(&self, index: usize) -> usize {
        let mut c = self.coords(index);
        for m in c.iter_mut() {
            *m = (*m).min(self.n - *m);
        }
        c.sort_unstable();
        self.flat_index(&c)
    }
}

/// All Laplacian eigenvalues `ε(k)` over the Brillouin zone.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionTable {
    spec: LatticeSpec,
    values: Vec<f64>,
    kappa0: f64,
    distinct: Vec<(f64, usize)>,
}

impl DispersionTable {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    /// `ε(k)` for every grid point, row-major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `κ₀ = Σ_{j≠0} 1/‖j‖^α`.
    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    /// Distinct levels with their multiplicities, ascending; the first entry
    /// is always the zero mode `(0, 1)`.
    pub fn distinct(&self) -> &[(f64, usize)] {
        &self.distinct
    }

    pub fn sites(&self) -> usize {
        self.spec.sites
    }

    /// `ε` at `k₁ = (2π/n, 0, ..., 0)`.
    pub fn eps_k1(&self) -> f64 {
        self.values[self.spec.n.pow(self.spec.d as u32 - 1)]
    }

    /// `ε` at `k_max = (π, ..., π)`.
    pub fn eps_kmax(&self) -> f64 {
        let half = vec![self.spec.n / 2; self.spec.d];
        self.values[self.spec.flat_index(&half)]
    }

    /// Largest `ε` over the zone (equal to `ε(k_max)` whenever all couplings
    /// are positive, but computed independently).
    pub fn eps_top(&self) -> f64 {
        self.distinct.last().map_or(0.0, |&(v, _)| v)
    }

    /// Grouping tolerance used around level `v`.
    pub fn grouping_tolerance(&self, v: f64) -> f64 {
        GROUPING_TOLERANCE * self.eps_kmax().min(v.abs())
    }

    /// Smallest nonzero level.
    pub fn min_nonzero(&self) -> f64 {
        self.distinct.get(1).map_or(0.0, |&(v, _)| v)
    }

    /// `Some((ε(k₁), min_{k≠0} ε))` when `k₁` is *not* the spectral minimum
    /// beyond the grouping tolerance; `None` when the gap is where expected.
    pub fn gap_minimality_violation(&self) -> Option<(f64, f64)> {
        let gap = self.eps_k1();
        let min = self.min_nonzero();
        (gap - min > self.grouping_tolerance(gap)).then_some((gap, min))
    }
}

/// Build the dispersion with the default site cap.
pub fn build_dispersion(spec: &LatticeSpec) -> Result<DispersionTable> {
    build_dispersion_with_cap(spec, DEFAULT_SITE_CAP)
}

/// Build the dispersion by a `d`-dimensional FFT of the coupling array.
///
/// The FFT output is made exactly symmetric by copying each orbit
/// representative's value to the whole point-group orbit, so that
/// symmetry-related momenta are bitwise degenerate.
pub fn build_dispersion_with_cap(spec: &LatticeSpec, cap: usize) -> Result<DispersionTable> {
    let sites = spec.sites();
    if sites > cap {
        return Err(Error::Resource {
            what: "dispersion table",
            requested: sites,
            cap,
        });
    }
    let n = spec.n();
    let d = spec.d();

    // coupling array in displacement space; c[0] = 0
    let axis_disp: Vec<i64> = (0..n).map(|m| spec.displacement(m)).collect();
    let mut buffer = vec![Complex64::new(0.0, 0.0); sites];
    let mut j = vec![0i64; d];
    let mut kappa0 = 0.0;
    for (index, slot) in buffer.iter_mut().enumerate().skip(1) {
        let mut rest = index;
        for a in (0..d).rev() {
            j[a] = axis_disp[rest % n];
            rest /= n;
        }
        let c = spec.coupling_unchecked(&j);
        *slot = Complex64::new(c, 0.0);
    }
    // sum smallest terms first
    let mut sorted: Vec<f64> = buffer.iter().skip(1).map(|c| c.re).collect();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    for c in sorted {
        kappa0 += c;
    }

    fft_nd(&mut buffer, n, d);

    let canonical: Vec<usize> = (0..sites).map(|i| spec.canonical_index(i)).collect();
    let mut values = vec![0.0; sites];
    for i in 1..sites {
        let e = buffer[canonical[i]].re;
        values[i] = (kappa0 - e).max(0.0);
    }
    values[0] = 0.0;

    let distinct = group_levels(&values, spec, &canonical);
    Ok(DispersionTable {
        spec: *spec,
        values,
        kappa0,
        distinct,
    })
}

pub(crate) fn fft_nd(buffer: &mut [Complex64], n: usize, d: usize) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let sites = buffer.len();
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(buffer, &mut scratch);
            continue;
        }
        let block = stride * n;
        for base in (0..sites).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (m, slot) in line.iter_mut().enumerate() {
                    *slot = buffer[start + m * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (m, value) in line.iter().enumerate() {
                    buffer[start + m * stride] = *value;
                }
            }
        }
    }
}

/// Group values into distinct levels: orbits first (exactly degenerate by
/// construction), then merge neighbours within the grouping tolerance.
fn group_levels(values: &[f64], spec: &LatticeSpec, canonical: &[usize]) -> Vec<(f64, usize)> {
    let mut orbit_size = vec![0usize; values.len()];
    for &c in canonical.iter().skip(1) {
        orbit_size[c] += 1;
    }
    let mut orbits: Vec<(f64, usize)> = orbit_size
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s > 0)
        .map(|(i, &s)| (values[i], s))
        .collect();
    orbits.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));

    let half = vec![spec.n() / 2; spec.d()];
    let top = values[spec.flat_index(&half)];
    let mut out: Vec<(f64, usize)> = vec![(0.0, 1)];
    // (start value, weighted sum, count)
    let mut current: Option<(f64, f64, usize)> = None;
    for (v, s) in orbits {
        match current {
            Some((start, sum, count)) if v - start <= GROUPING_TOLERANCE * top.min(start) => {
                current = Some((start, sum + v * s as f64, count + s));
            }
            _ => {
                if let Some((_, sum, count)) = current {
                    out.push((sum / count as f64, count));
                }
                current = Some((v, v * s as f64, s));
            }
        }
    }
    if let Some((_, sum, count)) = current {
        out.push((sum / count as f64, count));
    }
    out
}

/// Closed-form `κ₀` in one dimension: `2 H_{N/2}^{(α)} - 2^α N^{-α}`.
pub fn kappa0_closed_form_d1(n: usize, alpha: f64) -> Result<f64> {
    if (alpha - 1.0).abs() < 1e-12 {
        return Err(Error::Pole {
            function: "kappa0_closed_form_d1",
            at: alpha,
        });
    }
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidSpec(format!("n = {n} must be even")));
    }
    let nf = n as f64;
    Ok(2.0 * generalized_harmonic((n / 2) as u64, alpha) - 2f64.powf(alpha) * nf.powf(-alpha))
}

/// Spectral gap `δ = ε(k₁)`.
pub fn spectral_gap(table: &DispersionTable) -> f64 {
    table.eps_k1()
}

/// Rescaled gap `Δ = ε(k₁)/ε(k_max)`.
pub fn rescaled_gap(table: &DispersionTable) -> f64 {
    table.eps_k1() / table.eps_kmax()
}

/// Cumulative density of states over rescaled levels `λ = ε/ε(k_max)`.
///
/// One entry per distinct level, the zero mode included: the first entry
/// is `(0, 1/N)` and the last `(λ_max, 1)`.
pub fn cumulative_dos(table: &DispersionTable) -> Vec<(f64, f64)> {
    let top = table.eps_kmax();
    let sites = table.sites() as f64;
    let mut count = 0usize;
    table
        .distinct()
        .iter()
        .map(|&(v, m)| {
            count += m;
            (v / top, count as f64 / sites)
        })
        .collect()
}

/// Minimum number of DOS points required inside a fit window.
pub const MIN_DOS_POINTS: usize = 10;

/// Spectral dimension `d_s = 2 · slope` of `log ρ_CD` against `log λ`
/// over the open window `(lo, hi)`.
pub fn estimate_spectral_dimension(dos: &[(f64, f64)], window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::domain(
            "estimate_spectral_dimension",
            format!("window ({lo}, {hi}) must satisfy 0 < lo < hi"),
        ));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = dos
        .iter()
        .filter(|&&(l, f)| l > lo && l < hi && f > 0.0)
        .map(|&(l, f)| (l.ln(), f.ln()))
        .unzip();
    if xs.len() < MIN_DOS_POINTS {
        return Err(Error::InsufficientPoints {
            found: xs.len(),
            required: MIN_DOS_POINTS,
        });
    }
    let (slope, _) = linear_fit(&xs, &ys)?;
    Ok(2.0 * slope)
}
