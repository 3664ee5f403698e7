//! Dense complex polynomials in ascending-coefficient order.

use num_complex::Complex64 as C64;

pub(crate) fn trim(mut p: Vec<C64>) -> Vec<C64> {
    while p.len() > 1 && p[p.len() - 1] == C64::new(0.0, 0.0) {
        p.pop();
    }
    if p.is_empty() {
        p.push(C64::new(0.0, 0.0));
    }
    p
}

pub(crate) fn add(a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|k| a.get(k).copied().unwrap_or_default() + b.get(k).copied().unwrap_or_default())
        .collect();
    trim(out)
}

pub(crate) fn mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub(crate) fn scale(a: &[C64], c: C64) -> Vec<C64> {
    trim(a.iter().map(|&x| c * x).collect())
}

pub(crate) fn horner(a: &[C64], z: C64) -> C64 {
    a.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

pub(crate) fn degree(a: &[C64]) -> usize {
    trim(a.to_vec()).len() - 1
}

/// Taylor coefficients 0..=d of `num/den` about the origin. Requires `den[0] != 0`.
pub(crate) fn series_quotient(num: &[C64], den: &[C64], d: usize) -> Vec<C64> {
    let q0 = den[0];
    let mut out: Vec<C64> = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let mut acc = num.get(k).copied().unwrap_or_default();
        for j in 1..den.len().min(k + 1) {
            acc -= den[j] * out[k - j];
        }
        out.push(acc / q0);
    }
    out
}

/// All roots of a polynomial of degree >= 1 by Aberth–Ehrlich iteration.
pub(crate) fn roots(p: &[C64]) -> Vec<C64> {
    let p = trim(p.to_vec());
    let n = p.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = p[n];
    if n == 1 {
        return vec![-p[0] / lead];
    }
    let monic: Vec<C64> = p.iter().map(|&c| c / lead).collect();
    let deriv: Vec<C64> = (1..=n).map(|k| monic[k] * k as f64).collect();

    // Cauchy bound on root moduli.
    let bound = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let r0 = bound.min(1e6) * 0.5 + 0.1;
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(r0, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();

    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let pv = horner(&monic, z[i]);
            let dv = horner(&deriv, z[i]);
            if pv == C64::new(0.0, 0.0) {
                continue;
            }
            let ratio = pv / dv;
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += 1.0 / (z[i] - z[j]);
                }
            }
            let step = ratio / (1.0 - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn roots_of_quadratic() {
        // (z - 2)(z + 3i)
        let p = mul(&[c(-2.0), c(1.0)], &[C64::new(0.0, 3.0), c(1.0)]);
        let mut r = roots(&p);
        r.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
        assert!((r[0] - c(2.0)).norm() < 1e-12);
        assert!((r[1] - C64::new(0.0, -3.0)).norm() < 1e-12);
    }

    #[test]
    fn roots_of_repeated_factor() {
        let mut p = vec![c(1.0)];
        for _ in 0..4 {
            p = mul(&p, &[c(2.0), c(1.0)]);
        }
        for r in roots(&p) {
            // multiple roots converge only to ~eps^(1/4)
            assert!((r + c(2.0)).norm() < 1e-3, "{r}");
        }
    }

    #[test]
    fn quotient_series_of_geometric() {
        let s = series_quotient(&[c(1.0)], &[c(2.0), c(1.0)], 4);
        let want = [0.5, -0.25, 0.125, -0.0625, 0.03125];
        for (a, b) in s.iter().zip(want) {
            assert!((a - c(b)).norm() < 1e-15);
        }
    }
}
