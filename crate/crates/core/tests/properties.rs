mod common;

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use common::{random_expr, random_hermitian};

use subhardy::hermit::{eigenvalues, min_eig, psd_verdict, DEFAULT_TOL_REL};
use subhardy::kernels::{gram, KernelFamily, KernelSpec};
use subhardy::opcomp::{defect_compression, DefectVariant, Space};
use subhardy::points::{random_points, SplitMix64};
use subhardy::symbol::parse_expr;
use subhardy::Symbol;

#[test]
fn parse_print_round_trip_on_seeded_trees() {
    let mut rng = SplitMix64::new(2024);
    for k in 0..500 {
        let e = random_expr(&mut rng, 4);
        assert!(e.depth() <= 4);
        let text = e.to_string();
        let back = parse_expr(&text).unwrap_or_else(|err| panic!("tree {k}: '{text}': {err}"));
        assert_eq!(back, e, "tree {k}: '{text}'");
        assert_eq!(back.to_string(), text);
    }
}

#[test]
fn eigenvalue_trace_and_interlacing() {
    let mut rng = SplitMix64::new(99);
    for case in 0..100 {
        let n = 1 + (rng.next_u64() % 64) as usize;
        let h = random_hermitian(&mut rng, n);
        let scale = h.as_matrix().max_abs() * n as f64;
        let ev = eigenvalues(&h);
        assert_eq!(ev.len(), n);
        let sum: f64 = ev.iter().sum();
        assert!((sum - h.trace()).abs() <= 1e-12 * scale, "case {case}: trace");
        if n > 1 {
            // Cauchy interlacing for the leading principal submatrix
            let idx: Vec<usize> = (0..n - 1).collect();
            let sub = eigenvalues(&h.principal(&idx));
            for k in 0..n - 1 {
                assert!(ev[k] <= sub[k] + 1e-12 * scale, "case {case}: lower interlace at {k}");
                assert!(sub[k] <= ev[k + 1] + 1e-12 * scale, "case {case}: upper interlace at {k}");
            }
        }
    }
}

fn affine() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (-1.5f64..1.5, -1.5f64..1.5, -1.5f64..1.5, -1.5f64..1.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gram_matrices_are_hermitian_and_sb1_pieces_sum_to_bergman((a, b, c, d) in affine(), seed in 0u64..1000) {
        let f = Symbol::polynomial(&[C64::new(a, b), C64::new(c, d)]).unwrap();
        let pts = random_points(12, 0.9, seed).unwrap();
        let lo = gram(&KernelSpec::with_symbol(KernelFamily::Sb1Lower, &f).unwrap(), &pts);
        let up = gram(&KernelSpec::with_symbol(KernelFamily::Sb1Upper, &f).unwrap(), &pts);
        let b = gram(&KernelSpec::bergman(), &pts);
        let sum = lo.combine(1.0, &up, 1.0);
        prop_assert!(sum.max_diff(&b) <= 1e-13 * (1.0 + lo.scale()));
        for i in 0..pts.len() {
            prop_assert!(lo.get(i, i).im == 0.0);
        }
    }

    #[test]
    fn schur_affine_symbols_give_psd_grams(r in 0.0f64..1.0, t in 0.0f64..6.3, frac in 0.0f64..1.0, seed in 0u64..1000) {
        // |a| + |b| ≤ 1 keeps a + bz in the Schur class
        let a = C64::from_polar(r * frac, t);
        let b = C64::from_polar(r * (1.0 - frac), 2.0 * t);
        let f = Symbol::polynomial(&[a, b]).unwrap();
        let pts = random_points(20, 0.9, seed).unwrap();
        let v = psd_verdict(&gram(&KernelSpec::with_symbol(KernelFamily::SbDefect, &f).unwrap(), &pts), DEFAULT_TOL_REL);
        prop_assert!(v.min_eigenvalue >= -1e-9 * v.scale.max(1.0), "{} {}", f, v.min_eigenvalue);
        let s = gram(&KernelSpec::with_symbol(KernelFamily::SchurDefect, &f).unwrap(), &pts);
        prop_assert!(min_eig(&s).0 >= -1e-9 * s.scale().max(1.0));
    }

    #[test]
    fn bergman_sb_compression_of_schur_polynomials_is_psd(a in -0.5f64..0.5, b in -0.5f64..0.5, n in 1usize..40) {
        let f = Symbol::real_polynomial(&[a, b]).unwrap();
        let d = defect_compression(&f, n, Space::Bergman, DefectVariant::Sb);
        prop_assert!(min_eig(&d).0 >= -1e-12);
    }

    #[test]
    fn seeded_points_are_reproducible(n in 1usize..60, seed in any::<u64>()) {
        let a = random_points(n, 0.9, seed).unwrap();
        let b = random_points(n, 0.9, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.values().iter().all(|z| z.norm() <= 0.9));
    }

    #[test]
    fn printed_symbols_reparse(c0 in -3.0f64..3.0, c1 in -3.0f64..3.0, i1 in -3.0f64..3.0) {
        let f = Symbol::polynomial(&[C64::new(c0, 0.0), C64::new(c1, i1)]).unwrap();
        let g: Symbol = f.to_string().parse().unwrap();
        prop_assert_eq!(f, g);
    }
}
