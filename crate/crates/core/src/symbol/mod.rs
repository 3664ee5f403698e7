//! Bounded analytic symbols on the unit disk.
//!
//! A [`Symbol`] is a syntax tree over polynomials, Blaschke factors and
//! constants closed under sums, products, scaling and reciprocals. Every
//! such tree is a rational function whose denominator has no zeros in the
//! closed disk, so evaluation is exact (no series truncation) and Taylor
//! coefficients come with an explicit tail bound derived from the
//! denominator's zeros.

mod expr;
mod poly;

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub use expr::{parse_expr, Expr};
pub(crate) use expr::fmt_complex;

/// Number of boundary samples used to certify zero-freeness and modulus ranges.
pub const BOUNDARY_SAMPLES: usize = 4096;

/// A point strictly inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint(C64);

impl DiskPoint {
    pub fn new(z: C64) -> Result<Self> {
        if z.is_finite() && z.norm() < 1.0 {
            Ok(DiskPoint(z))
        } else {
            Err(Error::Domain(format!("{z} is not in the open unit disk")))
        }
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(C64::new(x, 0.0))
    }

    pub fn origin() -> Self {
        DiskPoint(C64::new(0.0, 0.0))
    }

    pub fn value(self) -> C64 {
        self.0
    }
}

/// Truncated Taylor expansion at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub coeffs: Vec<C64>,
    /// Upper bound on the sum of |a_k| over the discarded indices k > degree.
    pub tail_bound: f64,
}

impl Series {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: C64) -> C64 {
        poly::horner(&self.coeffs, z)
    }
}

/// Modulus statistics of a symbol on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryScan {
    pub min_modulus: f64,
    pub max_modulus: f64,
    /// Winding number of the boundary image around 0; `None` when a sample
    /// step was too coarse to track the argument reliably.
    pub winding: Option<i64>,
}

impl BoundaryScan {
    fn of(expr: &Expr) -> Self {
        let n = BOUNDARY_SAMPLES;
        let vals: Vec<C64> = (0..n)
            .map(|k| eval_expr(expr, C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)))
            .collect();
        let min_modulus = vals.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        let max_modulus = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut total = 0.0;
        let mut trackable = min_modulus > 0.0;
        for k in 0..n {
            let step = (vals[(k + 1) % n] / vals[k]).arg();
            if !step.is_finite() || step.abs() > PI / 2.0 {
                trackable = false;
            }
            total += step;
        }
        BoundaryScan {
            min_modulus,
            max_modulus,
            winding: trackable.then(|| (total / (2.0 * PI)).round() as i64),
        }
    }

    /// Zero-free on the closed disk: no boundary zero and zero winding.
    /// Conservative: an unresolvable scan counts as "not zero-free".
    pub fn zero_free(&self) -> bool {
        self.min_modulus > 1e-12 * self.max_modulus.max(f64::MIN_POSITIVE) && self.winding == Some(0)
    }
}

fn eval_expr(e: &Expr, z: C64) -> C64 {
    match e {
        Expr::Const(c) => *c,
        Expr::Poly(cs) => poly::horner(cs, z),
        Expr::Blaschke(a) => (z - a) / (1.0 - a.conj() * z),
        Expr::Recip(g) => 1.0 / eval_expr(g, z),
        Expr::Scale(c, g) => c * eval_expr(g, z),
        Expr::Sum(a, b) => eval_expr(a, z) + eval_expr(b, z),
        Expr::Product(a, b) => eval_expr(a, z) * eval_expr(b, z),
    }
}

fn check_literal(c: C64) -> Result<()> {
    if c.is_finite() {
        Ok(())
    } else {
        Err(Error::Semantic(format!("non-finite literal {c}")))
    }
}

/// Validates the tree and reduces it to `num / den`.
fn rational_form(e: &Expr) -> Result<(Vec<C64>, Vec<C64>)> {
    let one = vec![C64::new(1.0, 0.0)];
    Ok(match e {
        Expr::Const(c) => {
            check_literal(*c)?;
            (vec![*c], one)
        }
        Expr::Poly(cs) => {
            if cs.is_empty() {
                return Err(Error::Semantic("empty polynomial".into()));
            }
            for &c in cs {
                check_literal(c)?;
            }
            (poly::trim(cs.clone()), one)
        }
        Expr::Blaschke(a) => {
            check_literal(*a)?;
            if a.norm() >= 1.0 {
                return Err(Error::Semantic(format!(
                    "Blaschke parameter {} has modulus >= 1",
                    fmt_complex(*a)
                )));
            }
            (vec![-a, C64::new(1.0, 0.0)], vec![C64::new(1.0, 0.0), -a.conj()])
        }
        Expr::Recip(g) => {
            let (n, d) = rational_form(g)?;
            let scan = BoundaryScan::of(g);
            if !scan.zero_free() {
                return Err(Error::NotInvertible(format!(
                    "{g} has a zero in the closed disk (boundary min |f| = {:e}, winding {:?})",
                    scan.min_modulus, scan.winding
                )));
            }
            (d, n)
        }
        Expr::Scale(c, g) => {
            check_literal(*c)?;
            let (n, d) = rational_form(g)?;
            (poly::scale(&n, *c), d)
        }
        Expr::Sum(a, b) => {
            let (n1, d1) = rational_form(a)?;
            let (n2, d2) = rational_form(b)?;
            (poly::add(&poly::mul(&n1, &d2), &poly::mul(&n2, &d1)), poly::mul(&d1, &d2))
        }
        Expr::Product(a, b) => {
            let (n1, d1) = rational_form(a)?;
            let (n2, d2) = rational_form(b)?;
            (poly::mul(&n1, &n2), poly::mul(&d1, &d2))
        }
    })
}

/// An analytic symbol on a neighbourhood of the closed unit disk.
///
/// Immutable after construction; cloning is cheap relative to evaluation.
#[derive(Debug, Clone)]
pub struct Symbol {
    expr: Expr,
    num: Vec<C64>,
    den: Vec<C64>,
    den_roots: Vec<C64>,
    boundary: BoundaryScan,
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.expr == other.expr
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

impl std::str::FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Symbol::new(parse_expr(s)?)
    }
}

impl Symbol {
    pub fn new(expr: Expr) -> Result<Self> {
        let (num, den) = rational_form(&expr)?;
        // den(0) != 0 because den is zero-free on the closed disk
        let d0 = den[0];
        let num: Vec<C64> = num.iter().map(|&c| c / d0).collect();
        let den: Vec<C64> = den.iter().map(|&c| c / d0).collect();
        let den_roots = if poly::degree(&den) > 0 { poly::roots(&den) } else { Vec::new() };
        let boundary = BoundaryScan::of(&expr);
        Ok(Symbol {
            expr,
            num,
            den,
            den_roots,
            boundary,
        })
    }

    pub fn constant(c: C64) -> Result<Self> {
        Self::new(Expr::Const(c))
    }

    pub fn real_constant(c: f64) -> Result<Self> {
        Self::constant(C64::new(c, 0.0))
    }

    pub fn polynomial(coeffs: &[C64]) -> Result<Self> {
        Self::new(Expr::Poly(coeffs.to_vec()))
    }

    pub fn real_polynomial(coeffs: &[f64]) -> Result<Self> {
        Self::new(Expr::Poly(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect()))
    }

    /// The identity symbol z.
    pub fn identity() -> Self {
        Self::real_polynomial(&[0.0, 1.0]).expect("z is a valid symbol")
    }

    pub fn blaschke(a: C64) -> Result<Self> {
        Self::new(Expr::Blaschke(a))
    }

    /// `numer / denom`; rejected when `denom` vanishes somewhere on the closed disk.
    pub fn rational(numer: &[C64], denom: &[C64]) -> Result<Self> {
        Self::new(Expr::product(
            Expr::Poly(numer.to_vec()),
            Expr::recip(Expr::Poly(denom.to_vec())),
        ))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn eval(&self, p: DiskPoint) -> C64 {
        eval_expr(&self.expr, p.value())
    }

    /// Evaluation at an arbitrary complex number, rejecting points outside the open disk.
    pub fn eval_at(&self, z: C64) -> Result<C64> {
        Ok(self.eval(DiskPoint::new(z)?))
    }

    /// Evaluation anywhere on the closed disk (and slightly beyond, up to the
    /// nearest pole). Callers guarantee the argument is meaningful.
    pub(crate) fn value(&self, z: C64) -> C64 {
        eval_expr(&self.expr, z)
    }

    pub fn square(&self) -> Symbol {
        let expr = match &self.expr {
            Expr::Const(c) => Expr::Const(c * c),
            Expr::Poly(cs) => Expr::Poly(poly::mul(cs, cs)),
            e => Expr::product(e.clone(), e.clone()),
        };
        Symbol::new(expr).expect("square of a valid symbol is valid")
    }

    /// Exact reciprocal, as a rational symbol.
    pub fn reciprocal(&self) -> Result<Symbol> {
        match &self.expr {
            Expr::Const(c) if *c != C64::new(0.0, 0.0) => Symbol::constant(1.0 / c),
            e => Symbol::new(Expr::recip(e.clone())),
        }
    }

    pub fn scaled(&self, c: C64) -> Symbol {
        Symbol::new(Expr::scale(c, self.expr.clone())).expect("scaling preserves validity")
    }

    pub fn plus(&self, other: &Symbol) -> Symbol {
        Symbol::new(Expr::sum(self.expr.clone(), other.expr.clone())).expect("sum of valid symbols")
    }

    pub fn times(&self, other: &Symbol) -> Symbol {
        Symbol::new(Expr::product(self.expr.clone(), other.expr.clone()))
            .expect("product of valid symbols")
    }

    pub fn is_polynomial(&self) -> bool {
        poly::degree(&self.den) == 0
    }

    pub fn is_constant(&self) -> bool {
        self.is_polynomial() && poly::degree(&self.num) == 0
    }

    /// Value at the origin.
    pub fn at_zero(&self) -> C64 {
        self.value(C64::new(0.0, 0.0))
    }

    pub fn boundary(&self) -> BoundaryScan {
        self.boundary
    }

    /// Sampled supremum of |f| over the closed disk (maximum principle).
    pub fn sup_modulus(&self) -> f64 {
        self.boundary.max_modulus
    }

    /// Sampled infimum of |f| over the closed disk: the boundary minimum when
    /// f is zero-free, otherwise 0.
    pub fn inf_modulus(&self) -> f64 {
        if self.boundary.zero_free() {
            self.boundary.min_modulus
        } else {
            0.0
        }
    }

    /// Smallest modulus of a pole, or infinity for polynomials.
    pub fn pole_radius(&self) -> f64 {
        self.den_roots.iter().map(|r| r.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Backward shift (f(z) - f(0)) / z as an exact rational symbol. Its value
    /// at the origin is f'(0).
    pub fn backward_shift(&self) -> Symbol {
        let f0 = self.num.first().copied().unwrap_or_default();
        let mut top = poly::add(&self.num, &poly::scale(&self.den, -f0));
        if top.is_empty() {
            top.push(C64::new(0.0, 0.0));
        }
        let mut shifted: Vec<C64> = top.into_iter().skip(1).collect();
        shifted = poly::trim(shifted);
        if shifted.is_empty() {
            shifted.push(C64::new(0.0, 0.0));
        }
        let out = if self.is_polynomial() {
            Symbol::polynomial(&shifted)
        } else {
            Symbol::rational(&shifted, &self.den)
        };
        out.expect("backward shift keeps the denominator of a valid symbol")
    }

    /// Taylor coefficients a_0..=a_degree with a bound on the l1 norm of the rest.
    pub fn truncated_coeffs(&self, degree: usize) -> Series {
        if self.is_polynomial() {
            let coeffs = (0..=degree)
                .map(|k| self.num.get(k).copied().unwrap_or_default())
                .collect();
            let tail_bound = self.num.iter().skip(degree + 1).map(|c| c.norm()).fold(0.0, |a, b| a + b);
            return Series { coeffs, tail_bound };
        }
        let coeffs = poly::series_quotient(&self.num, &self.den, degree);
        Series {
            coeffs,
            tail_bound: self.majorant_tail(degree),
        }
    }

    /// Bounds sum_{k>d} |a_k| with the majorant |num|(z) / (|q_n| prod (|r_i| - z)),
    /// whose coefficients dominate those of num/den termwise.
    fn majorant_tail(&self, d: usize) -> f64 {
        let n = self.den.len() - 1;
        let lead = self.den[n].norm();
        let radii: Vec<f64> = self.den_roots.iter().map(|r| r.norm() * (1.0 - 1e-14)).collect();
        if radii.iter().any(|&r| r <= 1.0) {
            return f64::INFINITY;
        }
        let mut g = vec![0.0; d + 1];
        g[0] = 1.0 / lead;
        for &rho in &radii {
            // multiply by 1/(rho - z): t_k = (s_k + t_{k-1}) / rho
            let mut prev = 0.0;
            for gk in g.iter_mut() {
                let t = (*gk + prev) / rho;
                *gk = t;
                prev = t;
            }
        }
        let g_at_one: f64 = radii.iter().fold(1.0 / lead, |acc, &rho| acc / (rho - 1.0));
        let abs_num: Vec<f64> = self.num.iter().map(|c| c.norm()).collect();
        let total = abs_num.iter().sum::<f64>() * g_at_one;
        let mut head = 0.0;
        for k in 0..=d {
            for (i, &p) in abs_num.iter().enumerate().take(k + 1) {
                head += p * g[k - i];
            }
        }
        (total - head).max(0.0) + 8.0 * f64::EPSILON * total
    }
}
