//! Finite compressions of multiplication operators on the Hardy space
//! (basis `z^n`) and the Bergman space (basis `sqrt(n+1) z^n`).
//!
//! Multiplication by an analytic symbol is lower triangular in both bases,
//! so `P_N M_f M_f^* P_N` only involves the coefficients `a_0..a_N` and is
//! computed as a finite sum instead of a product of truncated matrices.
//! A PSD compression is evidence for operator positivity; a non-PSD one
//! disproves it.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermit::{min_eig, psd_verdict, CMatrix, HermitianMatrix, Verdict};
use crate::points::PointSet;
use crate::symbol::Symbol;

/// Extra coefficients requested beyond the compression order for non-polynomial symbols.
pub const EXTRA_DEGREE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Hardy,
    Bergman,
}

impl Space {
    /// Norm weight of `z^n`: the orthonormal basis vector is `z^n / weight(n)`.
    fn basis_scale(self, n: usize) -> f64 {
        match self {
            Space::Hardy => 1.0,
            Space::Bergman => ((n + 1) as f64).sqrt(),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::Hardy => "hardy",
            Space::Bergman => "bergman",
        })
    }
}

impl FromStr for Space {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hardy" => Ok(Space::Hardy),
            "bergman" => Ok(Space::Bergman),
            _ => Err(Error::Parameter(format!("unknown space '{s}' (hardy|bergman)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectVariant {
    /// I - 2 M_f M_f^* + M_{f²} M_{f²}^*
    Sb,
    /// 2 M_f M_f^* - M_{f²} M_{f²}^*
    Sb1Lower,
    /// I - (2 M_f M_f^* - M_{f²} M_{f²}^*)
    Sb1Upper,
}

impl fmt::Display for DefectVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DefectVariant::Sb => "sb",
            DefectVariant::Sb1Lower => "sb1-lower",
            DefectVariant::Sb1Upper => "sb1-upper",
        })
    }
}

impl FromStr for DefectVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sb" => Ok(DefectVariant::Sb),
            "sb1-lower" | "sb1_lower" => Ok(DefectVariant::Sb1Lower),
            "sb1-upper" | "sb1_upper" => Ok(DefectVariant::Sb1Upper),
            _ => Err(Error::Parameter(format!("unknown variant '{s}' (sb|sb1-lower|sb1-upper)"))),
        }
    }
}

/// Truncation metadata shared by all compressions of one symbol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationInfo {
    pub symbol_degree_used: usize,
    pub truncation_bound: f64,
    pub truncated: bool,
    /// n · tail², reported alongside non-polynomial compressions.
    pub entry_error_bound: f64,
}

impl TruncationInfo {
    pub fn for_symbol(f: &Symbol, n: usize) -> Self {
        let degree = n + EXTRA_DEGREE;
        let tail = f.truncated_coeffs(degree).tail_bound;
        TruncationInfo {
            symbol_degree_used: degree,
            truncation_bound: tail,
            truncated: tail > 0.0,
            entry_error_bound: (n + 1) as f64 * tail * tail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorCompression {
    pub space: Space,
    /// N + 1
    pub order: usize,
    pub matrix: CMatrix,
    pub symbol_degree_used: usize,
    pub truncation_bound: f64,
}

fn coefficients(f: &Symbol, n: usize) -> Vec<C64> {
    let mut c = f.truncated_coeffs(n + EXTRA_DEGREE).coeffs;
    c.truncate(n + 1);
    c
}

/// Matrix of M_f on span{e_0..e_N}: entry (m, n) = a_{m-n} · w(n)/w(m) for m ≥ n.
pub fn multiplier_matrix(f: &Symbol, n: usize, space: Space) -> OperatorCompression {
    let a = coefficients(f, n);
    let matrix = CMatrix::from_fn(n + 1, n + 1, |m, k| {
        if m >= k {
            a[m - k] * (space.basis_scale(k) / space.basis_scale(m))
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let info = TruncationInfo::for_symbol(f, n);
    OperatorCompression {
        space,
        order: n + 1,
        matrix,
        symbol_degree_used: info.symbol_degree_used,
        truncation_bound: info.truncation_bound,
    }
}

fn product_from_coeffs(a: &[C64], n: usize, space: Space) -> HermitianMatrix {
    HermitianMatrix::from_fn_symmetrized(n + 1, |m, k| {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..=m.min(k) {
            let w = match space {
                Space::Hardy => 1.0,
                Space::Bergman => (j + 1) as f64 / (((m + 1) * (k + 1)) as f64).sqrt(),
            };
            acc += a[m - j] * a[k - j].conj() * w;
        }
        acc
    })
}

/// P_N M_f M_f^* P_N, exact.
pub fn product_compression(f: &Symbol, n: usize, space: Space) -> HermitianMatrix {
    product_from_coeffs(&coefficients(f, n), n, space)
}

pub fn defect_compression(f: &Symbol, n: usize, space: Space, variant: DefectVariant) -> HermitianMatrix {
    let ff = product_compression(f, n, space);
    let gg = product_compression(&f.square(), n, space);
    let lower = ff.combine(2.0, &gg, -1.0);
    let id = HermitianMatrix::identity(n + 1);
    match variant {
        DefectVariant::Sb => id.combine(1.0, &ff, -2.0).combine(1.0, &gg, 1.0),
        DefectVariant::Sb1Lower => lower,
        DefectVariant::Sb1Upper => id.combine(1.0, &lower, -1.0),
    }
}

/// Coefficient vector of the reproducing kernel at λ, cut to degree N, in the
/// orthonormal basis of `space`.
pub fn kernel_section_vector(lam: C64, n: usize, space: Space) -> Vec<C64> {
    let c = lam.conj();
    let mut out = Vec::with_capacity(n + 1);
    let mut pow = C64::new(1.0, 0.0);
    for k in 0..=n {
        out.push(pow * space.basis_scale(k));
        pow *= c;
    }
    out
}

/// Q[i][j] = <A k_{λ_i}, k_{λ_j}> on truncated kernel sections. For A the
/// compression of a defect operator this converges to the matching kernel Gram.
pub fn section_form(a: &HermitianMatrix, pts: &PointSet, space: Space) -> HermitianMatrix {
    let n = a.order() - 1;
    let vecs: Vec<Vec<C64>> = pts
        .values()
        .iter()
        .map(|&z| kernel_section_vector(z, n, space))
        .collect();
    HermitianMatrix::from_fn_symmetrized(vecs.len(), |i, j| a.form(&vecs[j], &vecs[i]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub r: f64,
    pub min_eig: f64,
    pub psd: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flip {
    pub lo: f64,
    pub hi: f64,
    /// Bisection estimate of the parameter where the PSD verdict changes.
    pub root: f64,
    pub bracket_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    pub flips: Vec<Flip>,
}

impl ScanResult {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,min_eig,psd\n");
        for row in &self.rows {
            s.push_str(&format!("{:.16e},{:.16e},{}\n", row.r, row.min_eig, row.psd));
        }
        s
    }
}

/// Bisection stops once the bracket is narrower than this.
pub const SCAN_RESOLUTION: f64 = 1e-10;

/// Scans `r ↦ f_r` over `grid`, recording the PSD verdict of the defect
/// compression and bisecting every interval where the verdict flips.
pub fn threshold_scan<F>(
    family: F,
    grid: &[f64],
    n: usize,
    space: Space,
    variant: DefectVariant,
    tol_rel: f64,
) -> Result<ScanResult>
where
    F: Fn(f64) -> Result<Symbol>,
{
    let verdict_at = |r: f64| -> Result<Verdict> {
        let f = family(r)?;
        Ok(psd_verdict(&defect_compression(&f, n, space, variant), tol_rel))
    };
    let mut rows = Vec::with_capacity(grid.len());
    for &r in grid {
        let v = verdict_at(r)?;
        rows.push(ScanRow {
            r,
            min_eig: v.min_eigenvalue,
            psd: v.psd,
        });
    }
    let mut flips = Vec::new();
    for w in rows.windows(2) {
        if w[0].psd == w[1].psd {
            continue;
        }
        let (mut lo, mut hi) = (w[0].r, w[1].r);
        let lo_psd = w[0].psd;
        while (hi - lo).abs() > SCAN_RESOLUTION {
            let mid = 0.5 * (lo + hi);
            if verdict_at(mid)?.psd == lo_psd {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        flips.push(Flip {
            lo: w[0].r,
            hi: w[1].r,
            root: 0.5 * (lo + hi),
            bracket_width: (hi - lo).abs(),
        });
    }
    Ok(ScanResult { rows, flips })
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<f64>, _>>()
        .map_err(|e| Error::Parameter(format!("bad grid '{spec}': {e}")))?;
    match nums.as_slice() {
        [start, stop, step] if *step > 0.0 && stop >= start => {
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|k| start + k as f64 * step).collect())
        }
        _ => Err(Error::Parameter(format!("grid '{spec}' must be start:stop:step with step > 0"))),
    }
}

/// Smallest eigenvalue of a compression, for quick reporting.
pub fn compression_min_eig(f: &Symbol, n: usize, space: Space, variant: DefectVariant) -> f64 {
    min_eig(&defect_compression(f, n, space, variant)).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermit::DEFAULT_TOL_REL;
    use crate::kernels::{gram, KernelFamily, KernelSpec};
    use crate::points::polar_grid;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn rz(r: f64) -> Symbol {
        Symbol::real_polynomial(&[0.0, r]).unwrap()
    }

    #[test]
    fn multiplier_examples() {
        let r = 0.6;
        let h = multiplier_matrix(&rz(r), 2, Space::Hardy);
        assert_eq!(h.matrix[(1, 0)], c(r));
        assert_eq!(h.matrix[(2, 1)], c(r));
        assert_eq!(h.matrix[(0, 0)], c(0.0));
        assert_eq!(h.truncation_bound, 0.0);

        let b = multiplier_matrix(&rz(r), 2, Space::Bergman);
        assert!((b.matrix[(1, 0)] - c(r * 0.5f64.sqrt())).norm() < 1e-16);
        assert!((b.matrix[(2, 1)] - c(r * (2.0f64 / 3.0).sqrt())).norm() < 1e-16);

        let k = Symbol::constant(C64::new(0.3, -0.7)).unwrap();
        for space in [Space::Hardy, Space::Bergman] {
            let m = multiplier_matrix(&k, 4, space).matrix;
            let want = CMatrix::identity(5);
            assert!(m.max_diff(&CMatrix::from_fn(5, 5, |i, j| want[(i, j)] * C64::new(0.3, -0.7))) < 1e-16);
        }
    }

    #[test]
    fn bergman_weights_match_monomial_norms() {
        // ||z^n||^2 in the Bergman space is 1/(n+1); z * e_n = sqrt(n+1) z^{n+1}
        // has coordinate sqrt(n+1)/sqrt(n+2) on e_{n+1}.
        let m = multiplier_matrix(&Symbol::identity(), 6, Space::Bergman).matrix;
        for n in 0..6 {
            let want = ((n + 1) as f64 / (n + 2) as f64).sqrt();
            assert!((m[(n + 1, n)].re - want).abs() < 1e-15);
        }
    }

    #[test]
    fn product_compression_matches_truncated_product_for_triangular_symbols() {
        // For a polynomial of degree d, P_N M M* P_N equals (M_{N+d})(M_{N+d})* cut to N.
        let f = Symbol::polynomial(&[C64::new(0.2, 0.1), c(-0.4), C64::new(0.0, 0.3)]).unwrap();
        for space in [Space::Hardy, Space::Bergman] {
            let big = multiplier_matrix(&f, 12, space).matrix;
            let full = &big * &big.adjoint();
            let p = product_compression(&f, 8, space);
            for i in 0..=8 {
                for j in 0..=8 {
                    assert!((p.get(i, j) - full[(i, j)]).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn product_examples() {
        let r = 0.7;
        let h = product_compression(&rz(r), 5, Space::Hardy);
        assert_eq!(h.get(0, 0), c(0.0));
        for m in 1..=5 {
            assert!((h.get(m, m) - c(r * r)).norm() < 1e-16);
        }
        let b = product_compression(&rz(r), 5, Space::Bergman);
        for m in 1..=5 {
            assert!((b.get(m, m).re - r * r * m as f64 / (m + 1) as f64).abs() < 1e-16);
        }
        let z = product_compression(&Symbol::real_constant(0.0).unwrap(), 4, Space::Bergman);
        assert_eq!(z.scale(), 0.0);
    }

    #[test]
    fn defect_examples() {
        let r: f64 = 0.8;
        let d = defect_compression(&rz(r), 6, Space::Hardy, DefectVariant::Sb);
        let diag = d.diagonal();
        assert_eq!(diag[0], 1.0);
        assert!((diag[1] - (1.0 - 2.0 * r * r)).abs() < 4.0 * f64::EPSILON);
        assert!((diag[1] + 0.28).abs() < 4.0 * f64::EPSILON);
        assert!((diag[2] - 0.1296).abs() < 4.0 * f64::EPSILON);
        assert!(!psd_verdict(&d, DEFAULT_TOL_REL).psd);

        let k = Symbol::real_constant(1.2).unwrap();
        let lo = defect_compression(&k, 5, Space::Bergman, DefectVariant::Sb1Lower);
        assert!(lo.max_diff(&HermitianMatrix::identity(6).combine(0.8064, &lo, 0.0)) < 1e-14);
    }

    #[test]
    fn scan_finds_inverse_sqrt_two() {
        let res = threshold_scan(|r| Ok(rz(r)), &[0.5, 0.7, 0.71, 0.8], 16, Space::Hardy, DefectVariant::Sb, DEFAULT_TOL_REL).unwrap();
        assert_eq!(res.flips.len(), 1);
        let flip = &res.flips[0];
        assert_eq!((flip.lo, flip.hi), (0.7, 0.71));
        assert!((flip.root - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
        assert!(res.rows[1].psd && !res.rows[2].psd);

        let at_zero = threshold_scan(|r| Ok(rz(r)), &[0.0], 8, Space::Hardy, DefectVariant::Sb, DEFAULT_TOL_REL).unwrap();
        assert!(at_zero.rows[0].psd);
        assert!((at_zero.rows[0].min_eig - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scan_constant_family_in_bergman() {
        let res = threshold_scan(
            Symbol::real_constant,
            &[1.3, 1.5],
            6,
            Space::Bergman,
            DefectVariant::Sb1Lower,
            DEFAULT_TOL_REL,
        )
        .unwrap();
        assert!(res.rows[0].psd);
        assert!((res.rows[0].min_eig - 0.5239).abs() < 1e-12);
        assert!(!res.rows[1].psd);
        assert!((res.rows[1].min_eig + 0.5625).abs() < 1e-12);
        assert!((res.flips[0].root - std::f64::consts::SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0.5:0.9:0.01").unwrap();
        assert_eq!(g.len(), 41);
        assert!((g[40] - 0.9).abs() < 1e-12);
        assert!(parse_grid("0.5:0.9").is_err());
        assert!(parse_grid("0.9:0.5:0.1").is_err());
    }

    #[test]
    fn section_form_converges_to_kernel_gram() {
        let pts = polar_grid(2, 7, 0.7).unwrap();
        for s in ["poly:0,0.6", "poly:0.3,0.5,-0.2i", "poly:1.2,0.1"] {
            let f: Symbol = s.parse().unwrap();
            let d = defect_compression(&f, 64, Space::Hardy, DefectVariant::Sb);
            let q = section_form(&d, &pts, Space::Hardy);
            let g = gram(&KernelSpec::with_symbol(KernelFamily::HbTimesOneminus, &f).unwrap(), &pts);
            assert!(q.max_diff(&g) < 1e-8, "{s}: {}", q.max_diff(&g));
        }
    }

    #[test]
    fn bergman_sb_compressions_of_schur_symbols_are_psd() {
        for s in ["poly:0,1", "blaschke:0.5", "poly:0.5,0.3", "scale:0.5(recip(poly:2,1))"] {
            let f: Symbol = s.parse().unwrap();
            for n in [1, 8, 32, 128] {
                let d = defect_compression(&f, n, Space::Bergman, DefectVariant::Sb);
                let (lam, _) = min_eig(&d);
                assert!(lam >= -1e-10 * d.scale(), "{s} N={n}: {lam}");
            }
        }
    }
}
