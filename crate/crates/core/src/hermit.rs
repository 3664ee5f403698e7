//! Deterministic dense numerics for Hermitian positivity decisions.
//!
//! Eigenvalues come from cyclic Jacobi on the real symmetric embedding
//! `[[Re H, -Im H], [Im H, Re H]]`, whose spectrum is that of `H` with every
//! eigenvalue doubled. Singular values come from one-sided (Hestenes)
//! Jacobi applied directly to the complex matrix, which keeps small singular
//! values accurate relative to the largest one.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const MAX_SWEEPS: usize = 100;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parameter("ragged matrix rows".into()));
        }
        Ok(CMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn scale(&self, c: f64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    /// Largest entrywise absolute difference.
    pub fn max_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// A complex Hermitian matrix. Entries satisfy `a[i][j] == conj(a[j][i])`
/// exactly and the diagonal is real.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Assembles from an entry function, averaging `(i, j)` with `conj((j, i))`.
    pub fn from_fn_symmetrized(n: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(f(i, i).re, 0.0);
            for j in (i + 1)..n {
                let v = (f(i, j) + f(j, i).conj()) * 0.5;
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        HermitianMatrix(m)
    }

    /// Accepts a square matrix whose asymmetry is within `1e-12` of its largest entry.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::Parameter(format!("{}x{} matrix is not square", m.rows, m.cols)));
        }
        let n = m.rows;
        let mut asym: f64 = 0.0;
        for i in 0..n {
            for j in 0..=i {
                asym = asym.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if asym > 1e-12 * m.max_abs().max(f64::MIN_POSITIVE) {
            return Err(Error::NonHermitian(asym));
        }
        Ok(Self::from_fn_symmetrized(n, |i, j| m[(i, j)]))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(CMatrix::from_real_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(CMatrix::identity(n))
    }

    pub fn order(&self) -> usize {
        self.0.rows
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.order()).map(|i| self.0[(i, i)].re).collect()
    }

    /// max |diagonal entry|, the reference for relative tolerances.
    pub fn scale(&self) -> f64 {
        self.diagonal().iter().map(|d| d.abs()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// v^H A v (real for Hermitian A).
    pub fn quadratic_form(&self, v: &[C64]) -> f64 {
        let av = self.0.mul_vec(v);
        v.iter().zip(&av).map(|(x, y)| (x.conj() * y).re).sum()
    }

    /// Bilinear form w^H A v.
    pub fn form(&self, w: &[C64], v: &[C64]) -> C64 {
        let av = self.0.mul_vec(v);
        w.iter().zip(&av).map(|(x, y)| x.conj() * y).sum()
    }

    pub fn principal(&self, idx: &[usize]) -> HermitianMatrix {
        HermitianMatrix::from_fn_symmetrized(idx.len(), |i, j| self.0[(idx[i], idx[j])])
    }

    pub fn combine(&self, a: f64, other: &HermitianMatrix, b: f64) -> HermitianMatrix {
        let n = self.order();
        assert_eq!(n, other.order());
        HermitianMatrix::from_fn_symmetrized(n, |i, j| self.0[(i, j)] * a + other.0[(i, j)] * b)
    }

    pub fn max_diff(&self, other: &HermitianMatrix) -> f64 {
        self.0.max_diff(&other.0)
    }
}

/// Outcome of a positive-semidefiniteness decision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub psd: bool,
    pub min_eigenvalue: f64,
    /// Unit eigenvector for `min_eigenvalue`.
    pub witness: Vec<C64>,
    pub tolerance_used: f64,
    pub scale: f64,
}

/// Full eigendecomposition, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is a unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<C64>>,
}

struct RealJacobi {
    n: usize,
    a: Vec<f64>,
    v: Vec<f64>,
}

impl RealJacobi {
    fn embed(h: &HermitianMatrix) -> Self {
        let n = h.order();
        let m = 2 * n;
        let mut a = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                let z = h.get(i, j);
                a[i * m + j] = z.re;
                a[i * m + j + n] = -z.im;
                a[(i + n) * m + j] = z.im;
                a[(i + n) * m + j + n] = z.re;
            }
        }
        let mut v = vec![0.0; m * m];
        for i in 0..m {
            v[i * m + i] = 1.0;
        }
        RealJacobi { n: m, a, v }
    }

    fn run(&mut self) {
        let n = self.n;
        // Relative to the largest entry rather than the diagonal alone, so that
        // zero-diagonal matrices such as [[0,1],[1,0]] still converge.
        let reference = self.a.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if reference == 0.0 {
            return;
        }
        let threshold = 1e-14 * reference;
        for _ in 0..MAX_SWEEPS {
            let mut off: f64 = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(self.a[p * n + q].abs());
                }
            }
            if off <= threshold {
                return;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = self.a[p * n + q];
                    if apq.abs() <= 0.01 * threshold {
                        continue;
                    }
                    self.rotate(p, q, apq);
                }
            }
        }
    }

    fn rotate(&mut self, p: usize, q: usize, apq: f64) {
        let n = self.n;
        let app = self.a[p * n + p];
        let aqq = self.a[q * n + q];
        let theta = (aqq - app) / (2.0 * apq);
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;
        let a = &mut self.a;
        for k in 0..n {
            let akp = a[k * n + p];
            let akq = a[k * n + q];
            a[k * n + p] = c * akp - s * akq;
            a[k * n + q] = s * akp + c * akq;
        }
        for k in 0..n {
            let apk = a[p * n + k];
            let aqk = a[q * n + k];
            a[p * n + k] = c * apk - s * aqk;
            a[q * n + k] = s * apk + c * aqk;
        }
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        let v = &mut self.v;
        for k in 0..n {
            let vkp = v[k * n + p];
            let vkq = v[k * n + q];
            v[k * n + p] = c * vkp - s * vkq;
            v[k * n + q] = s * vkp + c * vkq;
        }
    }

    /// (eigenvalue, complex vector x + iy) for every embedded eigenpair, ascending.
    fn sorted_pairs(&self) -> Vec<(f64, Vec<C64>)> {
        let m = self.n;
        let h = m / 2;
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by(|&i, &j| {
            self.a[i * m + i]
                .partial_cmp(&self.a[j * m + j])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(i.cmp(&j))
        });
        idx.into_iter()
            .map(|k| {
                let vec = (0..h)
                    .map(|r| C64::new(self.v[r * m + k], self.v[(r + h) * m + k]))
                    .collect();
                (self.a[k * m + k], vec)
            })
            .collect()
    }
}

fn normalize(v: &mut [C64]) -> f64 {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
    norm
}

fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Eigenvalues of `h`, ascending, each reported once.
pub fn eigenvalues(h: &HermitianMatrix) -> Vec<f64> {
    if h.order() == 0 {
        return Vec::new();
    }
    let mut j = RealJacobi::embed(h);
    j.run();
    let pairs = j.sorted_pairs();
    pairs.chunks(2).map(|c| 0.5 * (c[0].0 + c[1].0)).collect()
}

/// Smallest eigenvalue and a unit eigenvector for it.
pub fn min_eig(h: &HermitianMatrix) -> (f64, Vec<C64>) {
    assert!(h.order() > 0, "min_eig of an empty matrix");
    let mut j = RealJacobi::embed(h);
    j.run();
    let pairs = j.sorted_pairs();
    let value = 0.5 * (pairs[0].0 + pairs[1].0);
    let mut w = pairs[0].1.clone();
    normalize(&mut w);
    (value, w)
}

/// PSD decision with tolerance `tol_rel · max|diag|`.
pub fn psd_verdict(h: &HermitianMatrix, tol_rel: f64) -> Verdict {
    psd_verdict_floor(h, tol_rel, 0.0)
}

/// As [`psd_verdict`], but the tolerance never drops below `abs_floor`.
/// Used when entries are small differences of large terms, so that rounding
/// in those terms is not mistaken for a negative eigenvalue.
pub fn psd_verdict_floor(h: &HermitianMatrix, tol_rel: f64, abs_floor: f64) -> Verdict {
    let scale = h.scale();
    let (min_eigenvalue, witness) = min_eig(h);
    let tolerance_used = (tol_rel * scale).max(abs_floor);
    Verdict {
        psd: min_eigenvalue >= -tolerance_used,
        min_eigenvalue,
        witness,
        tolerance_used,
        scale,
    }
}

/// Default relative PSD tolerance.
pub const DEFAULT_TOL_REL: f64 = 1e-10;

/// Full eigendecomposition. Eigenvectors inside a (numerically) repeated
/// eigenvalue cluster are selected from the embedded pairs by pivoted
/// Gram–Schmidt.
pub fn eigh(h: &HermitianMatrix) -> Eigen {
    let n = h.order();
    if n == 0 {
        return Eigen {
            values: Vec::new(),
            vectors: Vec::new(),
        };
    }
    let mut j = RealJacobi::embed(h);
    j.run();
    let pairs = j.sorted_pairs();
    let reference = h.as_matrix().max_abs().max(f64::MIN_POSITIVE);
    let gap = 1e-9 * reference;

    let mut accepted: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut start = 0;
    let mut seen = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 - pairs[end - 1].0 <= gap {
            end += 1;
        }
        seen += end - start;
        let take = (seen / 2).saturating_sub(accepted.len());
        let mut residuals: Vec<Vec<C64>> = pairs[start..end]
            .iter()
            .map(|(_, v)| {
                let mut r = v.clone();
                for u in &accepted {
                    let c = inner(u, &r);
                    for (ri, ui) in r.iter_mut().zip(u) {
                        *ri -= c * ui;
                    }
                }
                r
            })
            .collect();
        for _ in 0..take {
            let (best, _) = residuals
                .iter()
                .enumerate()
                .map(|(i, r)| (i, r.iter().map(|z| z.norm_sqr()).sum::<f64>()))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            let mut u = residuals.swap_remove(best);
            normalize(&mut u);
            for r in residuals.iter_mut() {
                let c = inner(&u, r);
                for (ri, ui) in r.iter_mut().zip(&u) {
                    *ri -= c * ui;
                }
            }
            accepted.push(u);
        }
        start = end;
    }

    let mut out: Vec<(f64, Vec<C64>)> = accepted
        .into_iter()
        .map(|v| (h.quadratic_form(&v), v))
        .collect();
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    Eigen {
        values: out.iter().map(|p| p.0).collect(),
        vectors: out.into_iter().map(|p| p.1).collect(),
    }
}

/// Principal square root of the PSD part of `h` (negative eigenvalues clamp to 0).
pub fn sqrt_psd(h: &HermitianMatrix) -> HermitianMatrix {
    let e = eigh(h);
    let n = h.order();
    HermitianMatrix::from_fn_symmetrized(n, |i, j| {
        e.values
            .iter()
            .zip(&e.vectors)
            .map(|(&lam, v)| v[i] * v[j].conj() * lam.max(0.0).sqrt())
            .sum()
    })
}

/// Spectral condition number of a positive definite matrix (infinite otherwise).
pub fn condition_number(h: &HermitianMatrix) -> f64 {
    let ev = eigenvalues(h);
    match (ev.first(), ev.last()) {
        (Some(&lo), Some(&hi)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Thin singular value decomposition `A = U diag(sigma) V^H`, sigma descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

/// Replaces (a_p, a_q) by (c a_p - s a_q', s a_p + c a_q') with a_q' = conj(phase) a_q.
fn rotate_columns(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, phase: C64) {
    let (lo, hi) = cols.split_at_mut(q);
    for (ap, aq) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
        let x = *ap;
        let y = *aq * phase.conj();
        *ap = x * c - y * s;
        *aq = x * s + y * c;
    }
}

/// One-sided Jacobi SVD.
pub fn svd(a: &CMatrix) -> Svd {
    let (m, k) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<C64>> = (0..k).map(|j| a.column(j)).collect();
    let mut vcols: Vec<Vec<C64>> = (0..k)
        .map(|j| (0..k).map(|i| if i == j { C64::new(1.0, 0.0) } else { ZERO }).collect())
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut cols, p, q, c, s, phase);
                rotate_columns(&mut vcols, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(f64, usize)> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| (c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(), j))
        .collect();
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    let sigma: Vec<f64> = order.iter().map(|o| o.0).collect();
    let u = CMatrix::from_fn(m, k, |i, r| {
        let (s, j) = order[r];
        if s > 0.0 {
            cols[j][i] / s
        } else {
            ZERO
        }
    });
    let v = CMatrix::from_fn(k, k, |i, r| vcols[order[r].1][i]);
    Svd { u, sigma, v }
}

/// Count of singular values above `rel_tol · sigma_max`, with the singular values.
pub fn numerical_rank(a: &CMatrix, rel_tol: f64) -> (usize, Vec<f64>) {
    let sigma = svd(a).sigma;
    let top = sigma.first().copied().unwrap_or(0.0);
    let rank = if top == 0.0 {
        0
    } else {
        sigma.iter().filter(|&&s| s > rel_tol * top).count()
    };
    (rank, sigma)
}

/// Minimum-norm least-squares solution, discarding singular values below `rcond · sigma_max`.
pub fn lstsq(a: &CMatrix, b: &[C64], rcond: f64) -> Vec<C64> {
    let d = svd(a);
    let top = d.sigma.first().copied().unwrap_or(0.0);
    let mut x = vec![ZERO; a.cols()];
    for (r, &s) in d.sigma.iter().enumerate() {
        if s <= rcond * top || s == 0.0 {
            continue;
        }
        let coef: C64 = (0..a.rows()).map(|i| d.u[(i, r)].conj() * b[i]).sum::<C64>() / s;
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += d.v[(i, r)] * coef;
        }
    }
    x
}
