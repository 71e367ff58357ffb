//! Brute-force references: dense real-space Hamiltonians, a symmetric
//! eigensolver, spectral time evolution and the direct `O(N²)` dispersion.
//!
//! Nothing here touches the FFT or the secular equation, so these routines
//! can serve as independent oracles for the fast paths.
//!
//! Two matrix realisations are offered. [`dense_hamiltonian`] is the full
//! `N × N` matrix. [`symmetric_sector`] is the same Hamiltonian restricted
//! to states invariant under the point group of the lattice (axis
//! reflections about the target and axis permutations), which contains
//! both `|w⟩` and `|s⟩` and hence the whole search dynamics. Its dimension
//! is the number of displacement orbits, e.g. `n/2 + 1` in one dimension.

use num_complex::Complex64;
use std::collections::BTreeMap;

use crate::lattice::LatticeSpec;
use crate::spectrum::participation_ratio;
use crate::{Error, Result};

/// Default cap on the dimension of a dense matrix.
pub const DENSE_CAP: usize = 4096;
/// Cap on the lattice size for the direct dispersion sum.
pub const BRUTE_DISPERSION_CAP: usize = 1 << 16;
/// Upper bound on QL sweeps per eigenvalue.
const QL_MAX_ITER: usize = 60;

/// A dense symmetric Hamiltonian in some orthonormal basis, with the target
/// state `w` and the uniform state `s` expressed in that basis.
#[derive(Debug, Clone)]
pub struct DenseSystem {
    dim: usize,
    sites: usize,
    h: Vec<f64>,
    w: Vec<f64>,
    s: Vec<f64>,
    eigenvalues: Vec<f64>,
    /// Column-major eigenvectors (`dim × dim`), present after a full solve.
    eigenvectors: Vec<f64>,
    w_overlap: Vec<f64>,
    s_overlap: Vec<f64>,
}

impl DenseSystem {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of lattice sites of the underlying system.
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Row-major matrix elements.
    pub fn matrix(&self) -> &[f64] {
        &self.h
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.h[row * self.dim + col]
    }

    pub fn target_state(&self) -> &[f64] {
        &self.w
    }

    pub fn uniform_state(&self) -> &[f64] {
        &self.s
    }

    /// Ascending eigenvalues; empty before diagonalisation.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector `i`; `None` unless [`dense_diagonalize`] was used.
    pub fn eigenvector(&self, i: usize) -> Option<&[f64]> {
        if self.eigenvectors.is_empty() || i >= self.dim {
            return None;
        }
        Some(&self.eigenvectors[i * self.dim..(i + 1) * self.dim])
    }

    /// `⟨w|v_i⟩` per eigenvalue.
    pub fn w_overlaps(&self) -> &[f64] {
        &self.w_overlap
    }

    /// `⟨s|v_i⟩` per eigenvalue.
    pub fn s_overlaps(&self) -> &[f64] {
        &self.s_overlap
    }

    /// `max |H_ab - H_ba|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..a {
                worst = worst.max((self.h[a * n + b] - self.h[b * n + a]).abs());
            }
        }
        worst
    }

    /// Add `c` to every diagonal element (drops any previous solution).
    pub fn shifted(&self, c: f64) -> DenseSystem {
        let mut out = self.undiagonalized();
        for i in 0..self.dim {
            out.h[i * self.dim + i] += c;
        }
        out
    }

    fn undiagonalized(&self) -> DenseSystem {
        DenseSystem {
            dim: self.dim,
            sites: self.sites,
            h: self.h.clone(),
            w: self.w.clone(),
            s: self.s.clone(),
            eigenvalues: Vec::new(),
            eigenvectors: Vec::new(),
            w_overlap: Vec::new(),
            s_overlap: Vec::new(),
        }
    }

    /// `H x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.h
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

fn direct_kappa0(spec: &LatticeSpec) -> f64 {
    let mut c: Vec<f64> = (1..spec.sites())
        .map(|b| spec.coupling_between(0, b).expect("b != 0"))
        .collect();
    c.sort_unstable_by(f64::total_cmp);
    c.iter().sum()
}

fn check_gamma(gamma0: f64) -> Result<()> {
    if gamma0 > 0.0 && gamma0.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("gamma0 = {gamma0} must be > 0")))
    }
}

/// Full real-space Hamiltonian with the default cap.
pub fn dense_hamiltonian(spec: &LatticeSpec, gamma0: f64, target: usize) -> Result<DenseSystem> {
    dense_hamiltonian_with_cap(spec, gamma0, target, DENSE_CAP)
}

/// `H_ab = -γ₀ c(a-b)` off the diagonal, `H_aa = γ₀κ₀ - [a = target]`.
pub fn dense_hamiltonian_with_cap(
    spec: &LatticeSpec,
    gamma0: f64,
    target: usize,
    cap: usize,
) -> Result<DenseSystem> {
    check_gamma(gamma0)?;
    let n = spec.sites();
    if n > cap {
        return Err(Error::Resource {
            what: "dense Hamiltonian",
            requested: n,
            cap,
        });
    }
    if target >= n {
        return Err(Error::InvalidSpec(format!(
            "target {target} outside [0, {n})"
        )));
    }
    // couplings depend only on the displacement: tabulate from site 0
    let from_origin: Vec<f64> = (0..n)
        .map(|b| spec.coupling_between(0, b).unwrap_or(0.0))
        .collect();
    let kappa0 = direct_kappa0(spec);
    let side = spec.n();
    let coords: Vec<Vec<usize>> = (0..n).map(|a| spec.coords(a)).collect();
    let mut h = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let rel = coords[a]
                .iter()
                .zip(&coords[b])
                .fold(0, |acc, (&x, &y)| acc * side + (y + side - x) % side);
            h[a * n + b] = -gamma0 * from_origin[rel];
        }
        h[a * n + a] = gamma0 * kappa0;
    }
    h[target * n + target] -= 1.0;
    let mut w = vec![0.0; n];
    w[target] = 1.0;
    let s = vec![1.0 / (n as f64).sqrt(); n];
    Ok(DenseSystem {
        dim: n,
        sites: n,
        h,
        w,
        s,
        eigenvalues: Vec::new(),
        eigenvectors: Vec::new(),
        w_overlap: Vec::new(),
        s_overlap: Vec::new(),
    })
}

/// The Hamiltonian restricted to the point-group-symmetric sector around
/// the target (taken at the origin; translation invariance makes this
/// general).
///
/// Basis states are normalised orbit sums `|O⟩ = |O|^{-1/2} Σ_{a∈O} |a⟩`,
/// with `⟨O|H|P⟩ = √(|O|/|P|) Σ_{b∈P} H_{a₀ b}` for any `a₀ ∈ O`. The
/// origin is its own orbit and comes first, so `w = e₀`, and
/// `⟨O|s⟩ = √(|O|/N)`.
pub fn symmetric_sector(spec: &LatticeSpec, gamma0: f64) -> Result<DenseSystem> {
    symmetric_sector_with_cap(spec, gamma0, DENSE_CAP)
}

pub fn symmetric_sector_with_cap(
    spec: &LatticeSpec,
    gamma0: f64,
    cap: usize,
) -> Result<DenseSystem> {
    check_gamma(gamma0)?;
    let n = spec.sites();
    let mut orbits: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for a in 0..n {
        orbits.entry(spec.canonical_index(a)).or_default().push(a);
    }
    let dim = orbits.len();
    if dim > cap {
        return Err(Error::Resource {
            what: "symmetric-sector Hamiltonian",
            requested: dim,
            cap,
        });
    }
    let slot: BTreeMap<usize, usize> = orbits.keys().enumerate().map(|(i, &k)| (k, i)).collect();
    let orbit_of: Vec<usize> = (0..n).map(|a| slot[&spec.canonical_index(a)]).collect();
    let sizes: Vec<f64> = orbits.values().map(|o| o.len() as f64).collect();
    let kappa0 = direct_kappa0(spec);

    let mut h = vec![0.0; dim * dim];
    for (o, members) in orbits.values().enumerate() {
        let a0 = members[0];
        // Σ_{b∈P} H_{a₀ b} accumulated per orbit P
        let mut row = vec![0.0; dim];
        for b in 0..n {
            let element = if b == a0 {
                gamma0 * kappa0 - if a0 == 0 { 1.0 } else { 0.0 }
            } else {
                -gamma0 * spec.coupling_between(a0, b).expect("a0 != b")
            };
            row[orbit_of[b]] += element;
        }
        for (p, value) in row.into_iter().enumerate() {
            h[o * dim + p] = (sizes[o] / sizes[p]).sqrt() * value;
        }
    }
    // exact symmetry up to rounding of the two routes
    for o in 0..dim {
        for p in 0..o {
            let mean = 0.5 * (h[o * dim + p] + h[p * dim + o]);
            h[o * dim + p] = mean;
            h[p * dim + o] = mean;
        }
    }
    let mut w = vec![0.0; dim];
    w[0] = 1.0;
    let s = sizes.iter().map(|&m| (m / n as f64).sqrt()).collect();
    Ok(DenseSystem {
        dim,
        sites: n,
        h,
        w,
        s,
        eigenvalues: Vec::new(),
        eigenvectors: Vec::new(),
        w_overlap: Vec::new(),
        s_overlap: Vec::new(),
    })
}

/// Householder reduction `A = Q T Qᵀ` of a symmetric matrix, keeping the
/// reflectors so that `Q` can be applied to vectors.
struct Tridiagonal {
    diag: Vec<f64>,
    /// `off[i]` couples `i-1` and `i`; `off[0] = 0`.
    off: Vec<f64>,
    /// `(β, v)` for the reflector acting on indices `k+1..`.
    reflectors: Vec<(f64, Vec<f64>)>,
}

impl Tridiagonal {
    /// Uses and updates only the lower triangle of `a`.
    fn reduce(mut a: Vec<f64>, n: usize) -> Self {
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n];
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
        let mut p = vec![0.0; n];
        for k in 0..n.saturating_sub(2) {
            diag[k] = a[k * n + k];
            let len = n - k - 1;
            let mut v: Vec<f64> = (0..len).map(|i| a[(k + 1 + i) * n + k]).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                off[k + 1] = 0.0;
                reflectors.push((0.0, v));
                continue;
            }
            let alpha = if v[0] > 0.0 { -norm } else { norm };
            v[0] -= alpha;
            let vv = v.iter().map(|x| x * x).sum::<f64>();
            let beta = 2.0 / vv;
            off[k + 1] = alpha;

            // p = β B v over the trailing block, from its lower triangle
            let base = k + 1;
            let p = &mut p[..len];
            p.iter_mut().for_each(|x| *x = 0.0);
            for i in 0..len {
                let row = &a[(base + i) * n + base..(base + i) * n + base + i + 1];
                let mut acc = 0.0;
                for j in 0..i {
                    acc += row[j] * v[j];
                    p[j] += row[j] * v[i];
                }
                p[i] += acc + row[i] * v[i];
            }
            for x in p.iter_mut() {
                *x *= beta;
            }
            let kappa = 0.5 * beta * p.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>();
            for (x, y) in p.iter_mut().zip(&v) {
                *x -= kappa * y;
            }
            // B -= v qᵀ + q vᵀ on the lower triangle
            for i in 0..len {
                let (vi, qi) = (v[i], p[i]);
                let row = &mut a[(base + i) * n + base..(base + i) * n + base + i + 1];
                for j in 0..=i {
                    row[j] -= vi * p[j] + qi * v[j];
                }
            }
            reflectors.push((beta, v));
        }
        if n >= 2 {
            diag[n - 2] = a[(n - 2) * n + n - 2];
            off[n - 1] = a[(n - 1) * n + n - 2];
        }
        if n >= 1 {
            diag[n - 1] = a[(n - 1) * n + n - 1];
        }
        Tridiagonal {
            diag,
            off,
            reflectors,
        }
    }

    /// `Qᵀ x`.
    fn apply_qt(&self, x: &mut [f64]) {
        for (k, (beta, v)) in self.reflectors.iter().enumerate() {
            reflect(&mut x[k + 1..], *beta, v);
        }
    }

    /// `Q x`.
    fn apply_q(&self, x: &mut [f64]) {
        for (k, (beta, v)) in self.reflectors.iter().enumerate().rev() {
            reflect(&mut x[k + 1..], *beta, v);
        }
    }
}

fn reflect(x: &mut [f64], beta: f64, v: &[f64]) {
    if beta == 0.0 {
        return;
    }
    let dot: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
    let scale = beta * dot;
    for (a, b) in x.iter_mut().zip(v) {
        *a -= scale * b;
    }
}

/// Implicit QL on a symmetric tridiagonal matrix. Every rotation is also
/// applied to the columns of the `rows × n` row-major block `z`, so rows
/// initialised to `uᵀ` end up holding `uᵀ V`.
fn tql(d: &mut [f64], off: &[f64], z: &mut [f64], rows: usize) -> Result<()> {
    let n = d.len();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[1..]);
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_ITER {
                    return Err(Error::EigenConvergence { index: l });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..rows {
                        let row = &mut z[k * n..(k + 1) * n];
                        let hk = row[i + 1];
                        row[i + 1] = s * row[i] + c * hk;
                        row[i] = c * row[i] - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

/// Full diagonalisation with eigenvectors (Householder + implicit QL).
pub fn dense_diagonalize(system: &DenseSystem) -> Result<DenseSystem> {
    let n = system.dim;
    let tri = Tridiagonal::reduce(system.h.clone(), n);
    // rows of Q: start from the identity and apply Q to each basis vector
    let mut z = vec![0.0; n * n];
    let mut column = vec![0.0; n];
    for j in 0..n {
        column.iter_mut().for_each(|x| *x = 0.0);
        column[j] = 1.0;
        tri.apply_q(&mut column);
        for (i, &x) in column.iter().enumerate() {
            z[i * n + j] = x;
        }
    }
    let mut d = tri.diag.clone();
    tql(&mut d, &tri.off, &mut z, n)?;

    let order = ascending_order(&d);
    let mut out = system.undiagonalized();
    out.eigenvalues = order.iter().map(|&i| d[i]).collect();
    out.eigenvectors = vec![0.0; n * n];
    for (col, &i) in order.iter().enumerate() {
        for r in 0..n {
            out.eigenvectors[col * n + r] = z[r * n + i];
        }
    }
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    out.w_overlap = (0..n)
        .map(|i| dot(&system.w, &out.eigenvectors[i * n..(i + 1) * n]))
        .collect();
    out.s_overlap = (0..n)
        .map(|i| dot(&system.s, &out.eigenvectors[i * n..(i + 1) * n]))
        .collect();
    Ok(out)
}

/// Eigenvalues with `⟨w|v_i⟩` and `⟨s|v_i⟩` but without eigenvectors:
/// `Qᵀw` and `Qᵀs` are carried through the QL rotations as two rows.
pub fn dense_overlaps(system: &DenseSystem) -> Result<DenseSystem> {
    let n = system.dim;
    let tri = Tridiagonal::reduce(system.h.clone(), n);
    let mut z = Vec::with_capacity(2 * n);
    let mut w = system.w.clone();
    tri.apply_qt(&mut w);
    let mut s = system.s.clone();
    tri.apply_qt(&mut s);
    z.extend_from_slice(&w);
    z.extend_from_slice(&s);
    let mut d = tri.diag.clone();
    tql(&mut d, &tri.off, &mut z, 2)?;

    let order = ascending_order(&d);
    let mut out = system.undiagonalized();
    out.eigenvalues = order.iter().map(|&i| d[i]).collect();
    out.w_overlap = order.iter().map(|&i| z[i]).collect();
    out.s_overlap = order.iter().map(|&i| z[n + i]).collect();
    Ok(out)
}

/// Lowest eigenpair by tridiagonalisation, QL eigenvalues and inverse
/// iteration on the tridiagonal matrix, transformed back with `Q`.
pub fn dense_ground_state(system: &DenseSystem) -> Result<(f64, Vec<f64>)> {
    let n = system.dim;
    let tri = Tridiagonal::reduce(system.h.clone(), n);
    let mut d = tri.diag.clone();
    tql(&mut d, &tri.off, &mut [], 0)?;
    let e0 = d.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = d.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    // just below E₀ the shifted matrix is positive definite: LDLᵀ is stable
    let shift = e0 - 1e-10 * scale;
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..3 {
        x = solve_shifted_tridiagonal(&tri.diag, &tri.off, shift, &x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    }
    tri.apply_q(&mut x);
    Ok((e0, x))
}

/// Solve `(T - σ) x = b` by the Thomas algorithm.
fn solve_shifted_tridiagonal(diag: &[f64], off: &[f64], sigma: f64, b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut denom = diag[0] - sigma;
    c[0] = if n > 1 { off[1] / denom } else { 0.0 };
    y[0] = b[0] / denom;
    for i in 1..n {
        denom = diag[i] - sigma - off[i] * c[i - 1];
        c[i] = if i + 1 < n { off[i + 1] / denom } else { 0.0 };
        y[i] = (b[i] - off[i] * y[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        y[i] -= c[i] * y[i + 1];
    }
    y
}

/// `A(t) = Σ_i ⟨w|v_i⟩⟨v_i|s⟩ e^{-iE_i t}` over the full spectrum.
pub fn dense_amplitude(system: &DenseSystem, t: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for ((&e, &w), &s) in system
        .eigenvalues
        .iter()
        .zip(&system.w_overlap)
        .zip(&system.s_overlap)
    {
        let (sin, cos) = (e * t).sin_cos();
        acc += Complex64::new(cos, -sin) * (w * s);
    }
    acc
}

/// `e^{-iHt}|s⟩` in the system's basis (requires eigenvectors).
pub fn dense_evolve(system: &DenseSystem, t: f64) -> Option<Vec<Complex64>> {
    let n = system.dim;
    if system.eigenvectors.is_empty() {
        return None;
    }
    let mut psi = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let v = &system.eigenvectors[i * n..(i + 1) * n];
        let (sin, cos) = (system.eigenvalues[i] * t).sin_cos();
        let coeff = Complex64::new(cos, -sin) * system.s_overlap[i];
        for (p, &x) in psi.iter_mut().zip(v) {
            *p += coeff * x;
        }
    }
    Some(psi)
}

/// `ε(k) = Σ_{j≠0} c(j) (1 - cos(k·j))` by direct summation, with the
/// default cap.
pub fn brute_dispersion(spec: &LatticeSpec) -> Result<Vec<f64>> {
    brute_dispersion_with_cap(spec, BRUTE_DISPERSION_CAP)
}

pub fn brute_dispersion_with_cap(spec: &LatticeSpec, cap: usize) -> Result<Vec<f64>> {
    let sites = spec.sites();
    if sites > cap {
        return Err(Error::Resource {
            what: "brute-force dispersion",
            requested: sites,
            cap,
        });
    }
    let n = spec.n();
    let two_pi = 2.0 * std::f64::consts::PI;
    // cos(2π r/n) for every phase index r; k·j = 2π (m·j mod n)/n
    let cos_table: Vec<f64> = (0..n)
        .map(|r| (two_pi * r as f64 / n as f64).cos())
        .collect();
    let couplings: Vec<(Vec<usize>, f64)> = (1..sites)
        .map(|j| (spec.coords(j), spec.coupling_between(0, j).expect("j != 0")))
        .collect();
    Ok((0..sites)
        .map(|k| {
            if k == 0 {
                return 0.0;
            }
            let m = spec.coords(k);
            let mut acc = 0.0;
            for (j, c) in &couplings {
                let phase = m.iter().zip(j).map(|(a, b)| a * b).sum::<usize>() % n;
                acc += c * (1.0 - cos_table[phase]);
            }
            acc
        })
        .collect())
}

/// Participation ratio of the dense ground state for each `γ₀`.
pub fn dense_participation_sweep(spec: &LatticeSpec, gammas: &[f64]) -> Result<Vec<(f64, f64)>> {
    gammas
        .iter()
        .map(|&g| {
            let system = dense_hamiltonian(spec, g, 0)?;
            let (_, v) = dense_ground_state(&system)?;
            Ok((g, participation_ratio(&v)?))
        })
        .collect()
}
