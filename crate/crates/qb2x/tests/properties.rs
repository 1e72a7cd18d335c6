//! Property-based invariant tests over randomized inputs.

use num_complex::Complex64;
use proptest::prelude::*;

use qb2x::expansion::{
    build_dlp, estimate_qbx_terms, Density, PotentialKind, Qb2xOptions, Qb2xRepresentation,
};
use qb2x::fourier_ext::{fit_fourier_extension, RealPolynomial, DEFAULT_SVD_CUTOFF};
use qb2x::geometry::{find_root_near, BoundaryCurve, LeafBox};
use qb2x::oracle::{oracle_adaptive, oracle_dlp_straight};

fn small_coeff() -> impl Strategy<Value = f64> {
    (-1.0f64..1.0).prop_map(|c| (c * 16.0).round() / 16.0)
}

/// A built representation shared across property cases (building one per
/// case would dominate the runtime without varying the invariant under test).
fn shared_rep() -> &'static Qb2xRepresentation {
    use std::sync::OnceLock;
    static REP: OnceLock<Qb2xRepresentation> = OnceLock::new();
    REP.get_or_init(|| {
        let curve =
            BoundaryCurve::new(RealPolynomial::monomial(vec![0.0, 0.0, -0.1])).unwrap();
        let rho = Density::Poly(RealPolynomial::chebyshev(vec![1.0, 0.5, 0.25]));
        build_dlp(
            &rho,
            &curve,
            &LeafBox::reference(),
            30,
            1e-12,
            &Qb2xOptions { k_override: Some(40), ..Qb2xOptions::default() },
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    /// Basis conversion is an involution on Chebyshev coefficient vectors.
    #[test]
    fn basis_round_trip(coeffs in prop::collection::vec(small_coeff(), 1..10)) {
        let p = RealPolynomial::chebyshev(coeffs.clone());
        let back = p.to_monomial().to_chebyshev();
        for (a, b) in coeffs.iter().zip(&back.coefficients) {
            prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    /// Fitted extensions of real data are conjugate-symmetric and reproduce
    /// the data on [-1, 1].
    #[test]
    fn extension_invariants(coeffs in prop::collection::vec(small_coeff(), 1..6)) {
        let p = RealPolynomial::chebyshev(coeffs);
        let ext = fit_fourier_extension(|x| p.eval(x), 20, DEFAULT_SVD_CUTOFF).unwrap();
        for q in 0..=20i64 {
            prop_assert_eq!(ext.weight(q).conj(), ext.weight(-q));
        }
        prop_assert!(ext.fit_residual <= 1e-12, "residual {:e}", ext.fit_residual);
        for j in 0..=40 {
            let x = -1.0 + j as f64 / 20.0;
            prop_assert!((ext.eval(x) - p.eval(x)).abs() <= 1e-12);
        }
    }

    /// The near root of z + i s(z) = w solves the equation to roundoff and
    /// reduces to w itself on the straight segment.
    #[test]
    fn root_residuals(x in -0.33f64..0.33, y in -0.66f64..-0.01, a in -0.12f64..0.0) {
        let w = Complex64::new(x, y);
        let curve = BoundaryCurve::new(RealPolynomial::monomial(vec![0.0, 0.0, a])).unwrap();
        let root = find_root_near(&curve, w).unwrap();
        prop_assert!((curve.lift(root) - w).norm() <= 1e-13 * (1.0 + w.norm()));
        let straight = find_root_near(&BoundaryCurve::straight(), w).unwrap();
        prop_assert_eq!(straight, w);
    }

    /// The two independent oracles agree on the straight segment.
    #[test]
    fn cross_oracle_agreement(
        coeffs in prop::collection::vec(small_coeff(), 1..5),
        x in -0.33f64..0.33,
        y in -0.66f64..-0.01,
    ) {
        let p = RealPolynomial::chebyshev(coeffs);
        let w = Complex64::new(x, y);
        let a = oracle_dlp_straight(&p, w).unwrap().value;
        let b = oracle_adaptive(
            PotentialKind::Dlp,
            &Density::Poly(p),
            &BoundaryCurve::straight(),
            w,
            1e-13,
        )
        .unwrap()
        .value;
        prop_assert!((a - b).abs() <= 1e-13, "{a} vs {b}");
    }

    /// Every evaluation of a built representation is harmonic: the 5-point
    /// discrete Laplacian vanishes to stencil accuracy.
    #[test]
    fn representation_is_harmonic(x in -0.25f64..0.25, y in -0.6f64..-0.06) {
        let rep = shared_rep();
        let w = Complex64::new(x, y);
        let h = 1e-4;
        let f = |w: Complex64| rep.eval(w).unwrap();
        let lap = (f(w + h) + f(w - h)
            + f(w + Complex64::new(0.0, h)) + f(w - Complex64::new(0.0, h))
            - 4.0 * f(w)) / (h * h);
        prop_assert!(lap.abs() <= 1e-5, "Laplacian {lap:e} at {w}");
    }

    /// The representation agrees with the adaptive oracle at random targets.
    #[test]
    fn representation_matches_oracle(x in -0.33f64..0.33, y in -0.66f64..-0.01) {
        let rep = shared_rep();
        let w = Complex64::new(x, y);
        let rho = Density::Poly(RealPolynomial::chebyshev(vec![1.0, 0.5, 0.25]));
        let want = oracle_adaptive(PotentialKind::Dlp, &rho, &rep.curve, w, 1e-13)
            .unwrap()
            .value;
        prop_assert!((rep.eval(w).unwrap() - want).abs() <= 1e-11);
    }

    /// The term estimate grows with p and shrinks as eps loosens.
    #[test]
    fn term_estimate_monotone(p in 0usize..60) {
        let tight = estimate_qbx_terms(p, 1e-16);
        prop_assert!(estimate_qbx_terms(p + 1, 1e-16) >= tight);
        prop_assert!(estimate_qbx_terms(p, 1e-8) <= tight);
    }
}
