//! Seeded generators shared by the integration tests.

#![allow(dead_code)]

use num_complex::Complex64 as C64;

use subhardy::points::SplitMix64;
use subhardy::symbol::Expr;
use subhardy::HermitianMatrix;

pub fn lit(rng: &mut SplitMix64) -> C64 {
    // short decimals and awkward binary fractions alike
    let pick = |rng: &mut SplitMix64| match rng.next_u64() % 4 {
        0 => 0.0,
        1 => (rng.uniform(-5.0, 5.0) * 100.0).round() / 100.0,
        2 => rng.uniform(-3.0, 3.0),
        _ => rng.uniform(-1e-3, 1e-3),
    };
    let re = pick(rng);
    let im = if rng.next_u64().is_multiple_of(2) { 0.0 } else { pick(rng) };
    C64::new(re, im)
}

pub fn random_expr(rng: &mut SplitMix64, depth: usize) -> Expr {
    let leaf = depth <= 1 || rng.next_u64().is_multiple_of(3);
    if leaf {
        return match rng.next_u64() % 3 {
            0 => Expr::Const(lit(rng)),
            1 => Expr::Poly((0..1 + rng.next_u64() % 4).map(|_| lit(rng)).collect()),
            _ => Expr::Blaschke(C64::from_polar(rng.uniform(0.0, 0.95), rng.uniform(-3.0, 3.0))),
        };
    }
    let d = depth - 1;
    match rng.next_u64() % 4 {
        0 => Expr::recip(random_expr(rng, d)),
        1 => Expr::scale(lit(rng), random_expr(rng, d)),
        2 => Expr::sum(random_expr(rng, d), random_expr(rng, d)),
        _ => Expr::product(random_expr(rng, d), random_expr(rng, d)),
    }
}

pub fn random_hermitian(rng: &mut SplitMix64, n: usize) -> HermitianMatrix {
    let mut vals = vec![C64::new(0.0, 0.0); n * n];
    for v in vals.iter_mut() {
        *v = C64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    }
    HermitianMatrix::from_fn_symmetrized(n, |i, j| vals[i * n + j])
}
