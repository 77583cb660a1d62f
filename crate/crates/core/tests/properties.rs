use num_complex::Complex64;
use proptest::prelude::*;

use mixnorm_core::littlewood_paley::LPFamily;
use mixnorm_core::maximal::{fiber_max_brute, fiber_max_fast};
use mixnorm_core::mixed_grid::mixed_norm_raw;
use mixnorm_core::spaces::{tl_norm, SpaceKind, SpaceParams};
use mixnorm_core::{aniso_dilate, aniso_norm, AnisotropyVector, ExponentVector, Grid, GridFunction, Space};

const TOL: f64 = 1e-12;

fn anisotropy(n: usize) -> impl Strategy<Value = AnisotropyVector> {
    prop::collection::vec(1.0f64..4.0, n).prop_map(|a| AnisotropyVector::new(a).unwrap())
}

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, n)
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![0.3f64..8.0, Just(1.0), Just(2.0), Just(f64::INFINITY)]
}

/// Two nonnegative sample arrays on a `d0 x d1` grid with exponents.
fn mixed_case() -> impl Strategy<Value = (Vec<usize>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..12, 1usize..12, exponent(), exponent()).prop_flat_map(|(d0, d1, p0, p1)| {
        let len = d0 * d1;
        (
            Just(vec![d0, d1]),
            Just(vec![p0, p1]),
            prop::collection::vec(0.0f64..10.0, len),
            prop::collection::vec(0.0f64..10.0, len),
        )
    })
}

proptest! {
    #[test]
    fn aniso_norm_is_homogeneous(a in anisotropy(3), x in point(3), log_lambda in -6.0f64..6.0) {
        let lambda = log_lambda.exp2();
        let base = aniso_norm(&x, &a, TOL).unwrap();
        prop_assume!(base > 0.0);
        let scaled = aniso_norm(&aniso_dilate(lambda, &a, &x).unwrap(), &a, TOL).unwrap();
        prop_assert!((scaled / (lambda * base) - 1.0).abs() <= 1e-9, "{scaled} vs {}", lambda * base);
    }

    #[test]
    fn aniso_norm_triangle(a in anisotropy(2), x in point(2), y in point(2)) {
        let s: Vec<f64> = x.iter().zip(&y).map(|(u, v)| u + v).collect();
        let lhs = aniso_norm(&s, &a, TOL).unwrap();
        let rhs = aniso_norm(&x, &a, TOL).unwrap() + aniso_norm(&y, &a, TOL).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-9), "{lhs} > {rhs}");
    }

    #[test]
    fn mixed_norm_is_homogeneous((dims, p, u, _v) in mixed_case(), c in 1e-3f64..1e3) {
        let h = [0.5, 0.25];
        let base = mixed_norm_raw(&u, &dims, &h, &p).unwrap();
        let cu: Vec<f64> = u.iter().map(|x| c * x).collect();
        let scaled = mixed_norm_raw(&cu, &dims, &h, &p).unwrap();
        prop_assert!((scaled - c * base).abs() <= 1e-11 * c * base, "{scaled} vs {}", c * base);
    }

    /// `||u + v|| <= C (||u|| + ||v||)` with `C = prod max(1, 2^{1/p_k - 1})`.
    #[test]
    fn mixed_norm_quasi_triangle((dims, p, u, v) in mixed_case()) {
        let h = [0.5, 0.25];
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let c: f64 = p.iter().map(|pk| (1.0 / pk - 1.0).max(0.0).exp2()).product();
        let lhs = mixed_norm_raw(&w, &dims, &h, &p).unwrap();
        let rhs = mixed_norm_raw(&u, &dims, &h, &p).unwrap() + mixed_norm_raw(&v, &dims, &h, &p).unwrap();
        prop_assert!(lhs <= c * rhs * (1.0 + 1e-12), "{lhs} > {c} * {rhs}");
    }

    #[test]
    fn maximal_is_sublinear(
        (u, v) in (1usize..300).prop_flat_map(|n| (
            prop::collection::vec(0.0f64..5.0, n),
            prop::collection::vec(0.0f64..5.0, n),
        ))
    ) {
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let (mu, mv, mw) = (fiber_max_fast(&u), fiber_max_fast(&v), fiber_max_fast(&w));
        for i in 0..w.len() {
            prop_assert!(mw[i] <= (mu[i] + mv[i]) * (1.0 + 1e-12), "at {i}: {} > {}", mw[i], mu[i] + mv[i]);
            prop_assert!(mw[i] >= w[i] * (1.0 - 1e-12));
        }
        prop_assert_eq!(mw, fiber_max_brute(&w));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tl_norm_is_homogeneous(
        c in 1e-2f64..1e2,
        phase in 0.0f64..6.28,
        center in (-2.0f64..2.0, -2.0f64..2.0),
        s in -1.0f64..2.0,
    ) {
        let a = AnisotropyVector::new(vec![1.0, 2.0]).unwrap();
        let g = Grid::cube(2, 32, 8.0).unwrap();
        let f = GridFunction::from_fn(g.clone(), Space::Physical, |x| {
            Complex64::new((-(x[0] - center.0).powi(2) - (x[1] - center.1).powi(2)).exp(), 0.0)
        });
        let fam = LPFamily::build_truncated(&a, LPFamily::covering_level(&a, &g), &g).unwrap();
        let p = ExponentVector::new(vec![2.0, 1.5]).unwrap();
        let prm = SpaceParams::new(SpaceKind::TriebelLizorkin, s, p, 2.0, a).unwrap();
        let base = tl_norm(&f, &prm, &fam).unwrap().value;
        let scaled = tl_norm(&f.scale(Complex64::from_polar(c, phase)), &prm, &fam).unwrap().value;
        prop_assert!((scaled / (c * base) - 1.0).abs() <= 1e-12, "{scaled} vs {}", c * base);
    }
}
