//! Acceptance gate: one test per acceptance criterion, each printing a
//! single PASS line (or panicking with a FAIL line). Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use num_complex::Complex64;
use rayon::prelude::*;

use qb2x::contour::{build_lower_contour, build_upper_contour};
use qb2x::expansion::{
    build_dlp, build_slp, estimate_qbx_terms, Density, PotentialKind, Qb2xOptions,
    Qb2xRepresentation,
};
use qb2x::fourier_ext::{fit_fourier_extension, RealPolynomial, DEFAULT_SVD_CUTOFF};
use qb2x::geometry::{compute_r_max, find_root_near, BoundaryCurve, LeafBox};
use qb2x::oracle::{harmonic_test_field, oracle_adaptive, oracle_dlp_straight};

const GRID: usize = 51;
const CURVE_CLEARANCE: f64 = 1e-3;
const ORACLE_TOL: f64 = 1e-13;

fn reference_density() -> Density {
    // (2x^2 + 2x + 3)/4
    Density::Poly(RealPolynomial::chebyshev(vec![1.0, 0.5, 0.25]))
}

fn cubic_density() -> Density {
    // (4x^3 + 4x^2 + x + 6)/8
    Density::Poly(RealPolynomial::chebyshev(vec![1.0, 0.5, 0.25, 0.125]))
}

fn quadratic_curve() -> BoundaryCurve {
    BoundaryCurve::new(RealPolynomial::monomial(vec![0.0, 0.0, -0.1])).unwrap()
}

fn quartic_curve() -> BoundaryCurve {
    BoundaryCurve::new(RealPolynomial::monomial(vec![0.0, 0.0, -0.1, 0.0, -0.1])).unwrap()
}

fn grid_points(curve: &BoundaryCurve, leaf: &LeafBox) -> Vec<Complex64> {
    let coord = |c: f64, h: f64, j: usize| c - h + 2.0 * h * j as f64 / (GRID - 1) as f64;
    let mut pts = Vec::new();
    for jy in 0..GRID {
        let y = coord(leaf.center.im, leaf.half_width_y, jy);
        for jx in 0..GRID {
            let x = coord(leaf.center.re, leaf.half_width_x, jx);
            if curve.height(x) - y >= CURVE_CLEARANCE {
                pts.push(Complex64::new(x, y));
            }
        }
    }
    pts
}

fn reference_value(
    kind: PotentialKind,
    rho: &Density,
    curve: &BoundaryCurve,
    w: Complex64,
) -> f64 {
    if let (PotentialKind::Dlp, Density::Poly(p), true) = (kind, rho, curve.is_straight()) {
        return oracle_dlp_straight(p, w).unwrap().value;
    }
    oracle_adaptive(kind, rho, curve, w, ORACLE_TOL).unwrap().value
}

fn build(
    kind: PotentialKind,
    rho: &Density,
    curve: &BoundaryCurve,
    max_freq: usize,
    k: usize,
) -> Qb2xRepresentation {
    let leaf = LeafBox::reference();
    let opts = Qb2xOptions { k_override: Some(k), ..Qb2xOptions::default() };
    match kind {
        PotentialKind::Dlp => build_dlp(rho, curve, &leaf, max_freq, 1e-12, &opts),
        PotentialKind::Slp => build_slp(rho, curve, &leaf, max_freq, 1e-12, &opts),
    }
    .unwrap()
}

fn max_grid_error(rep: &Qb2xRepresentation, rho: &Density) -> f64 {
    grid_points(&rep.curve, &rep.leaf)
        .par_iter()
        .map(|&w| {
            let got = rep.eval(w).unwrap();
            let want = reference_value(rep.kind, rho, &rep.curve, w);
            (got - want).abs()
        })
        .reduce(|| 0.0, f64::max)
}

fn check(criterion: &str, label: &str, value: f64, bound: f64) {
    assert!(
        value <= bound,
        "criterion {criterion} FAIL: {label} error {value:.3e} > {bound:.0e}"
    );
}

fn report(criterion: &str, detail: &str) {
    println!("criterion {criterion}: PASS ({detail})");
}

#[test]
fn criterion_01_straight_dlp_reference_densities() {
    let curve = BoundaryCurve::straight();
    let cases: [(&str, Density, usize); 4] = [
        ("cos", Density::Cos, 1),
        ("expcos", Density::ExpCos, 20),
        ("quadratic", reference_density(), 30),
        ("cubic", cubic_density(), 30),
    ];
    let mut worst = 0.0f64;
    for (label, rho, p) in cases {
        let rep = build(PotentialKind::Dlp, &rho, &curve, p, 40);
        let err = max_grid_error(&rep, &rho);
        check("1", label, err, 1e-13);
        worst = worst.max(err);
    }
    report("1", &format!("straight DLP, four densities, worst max err {worst:.3e} <= 1e-13"));
}

#[test]
fn criterion_02_dlp_k_sweep() {
    let curve = BoundaryCurve::straight();
    let rho = reference_density();
    let mut detail = String::new();
    for (k, bound) in [(9usize, 1e-3), (18, 1e-6), (27, 1e-9), (36, 1e-12)] {
        let rep = build(PotentialKind::Dlp, &rho, &curve, 30, k);
        let err = max_grid_error(&rep, &rho);
        check("2", &format!("K={k}"), err, bound);
        detail.push_str(&format!("K={k}: {err:.2e} "));
    }
    report("2", &format!("DLP K-sweep {detail}within 1e-3/1e-6/1e-9/1e-12"));
}

#[test]
fn criterion_03_curved_dlp() {
    let rho = reference_density();
    let rep = build(PotentialKind::Dlp, &rho, &quadratic_curve(), 30, 40);
    let err_quad = max_grid_error(&rep, &rho);
    check("3", "quadratic curve K=40", err_quad, 1e-11);
    let rep = build(PotentialKind::Dlp, &rho, &quartic_curve(), 30, 50);
    let err_quart = max_grid_error(&rep, &rho);
    check("3", "quartic curve K=50", err_quart, 1e-11);
    report("3", &format!("curved DLP, quadratic {err_quad:.3e}, quartic {err_quart:.3e} <= 1e-11"));
}

#[test]
fn criterion_04_straight_slp_reference_densities() {
    let curve = BoundaryCurve::straight();
    let cases: [(&str, Density, usize); 4] = [
        ("cos", Density::Cos, 1),
        ("expcos", Density::ExpCos, 20),
        ("quadratic", reference_density(), 30),
        ("cubic", cubic_density(), 30),
    ];
    let mut worst = 0.0f64;
    for (label, rho, p) in cases {
        let rep = build(PotentialKind::Slp, &rho, &curve, p, 40);
        let err = max_grid_error(&rep, &rho);
        check("4", label, err, 1e-12);
        worst = worst.max(err);
    }
    report("4", &format!("straight SLP, four densities, worst max err {worst:.3e} <= 1e-12"));
}

#[test]
fn criterion_05_slp_k_sweep() {
    let curve = BoundaryCurve::straight();
    let rho = reference_density();
    let mut detail = String::new();
    for (k, bound) in [(9usize, 1e-3), (18, 1e-6), (27, 1e-9), (36, 1e-12)] {
        let rep = build(PotentialKind::Slp, &rho, &curve, 30, k);
        let err = max_grid_error(&rep, &rho);
        check("5", &format!("K={k}"), err, bound);
        detail.push_str(&format!("K={k}: {err:.2e} "));
    }
    report("5", &format!("SLP K-sweep {detail}within 1e-3/1e-6/1e-9/1e-12"));
}

#[test]
fn criterion_06_curved_slp() {
    let rho = reference_density();
    let curve = quadratic_curve();
    let rep = build(PotentialKind::Slp, &rho, &curve, 30, 18);
    let err18 = max_grid_error(&rep, &rho);
    check("6", "K=18", err18, 1e-5);
    let rep = build(PotentialKind::Slp, &rho, &curve, 30, 36);
    let err36 = max_grid_error(&rep, &rho);
    check("6", "K=36", err36, 1e-11);
    report("6", &format!("curved SLP, K=18 {err18:.3e} <= 1e-5, K=36 {err36:.3e} <= 1e-11"));
}

#[test]
fn criterion_07_r_max_reference_values() {
    let leaf = LeafBox::reference();
    let upper = build_upper_contour();
    let lower = build_lower_contour(45.0);
    let cases = [
        ("straight", BoundaryCurve::straight(), 0.354, 0.471),
        ("quadratic", quadratic_curve(), 0.329, 0.506),
        ("quartic", quartic_curve(), 0.354, 0.622),
    ];
    let mut detail = String::new();
    for (label, curve, want_up, want_low) in cases {
        let up = compute_r_max(&upper, &curve, &leaf).unwrap();
        let low = compute_r_max(&lower, &curve, &leaf).unwrap();
        assert!(
            (up - want_up).abs() <= 0.005 && (low - want_low).abs() <= 0.005,
            "criterion 7 FAIL: {label} r_max ({up:.4}, {low:.4}) vs ({want_up}, {want_low})"
        );
        detail.push_str(&format!("{label} ({up:.3}, {low:.3}) "));
    }
    report("7", &format!("r_max {detail}all within 0.005 of reference"));
}

#[test]
fn criterion_08_qbx_term_estimate() {
    let n = estimate_qbx_terms(30, 1e-16);
    assert!(
        (109..=113).contains(&n),
        "criterion 8 FAIL: N(30, 1e-16) = {n}, expected 111 +/- 2"
    );
    report("8", &format!("N(p=30, eps=1e-16) = {n}, within 111 +/- 2"));
}

#[test]
fn criterion_09_property_suite() {
    let rho = reference_density();
    let leaf = LeafBox::reference();

    // harmonicity: 5-point Laplacian at 20 interior points for one rep per
    // curve/kind family
    let reps = [
        build(PotentialKind::Dlp, &rho, &BoundaryCurve::straight(), 30, 40),
        build(PotentialKind::Slp, &rho, &quadratic_curve(), 30, 36),
        build(PotentialKind::Dlp, &rho, &quartic_curve(), 30, 50),
    ];
    let h = 1e-4;
    for rep in &reps {
        for j in 0..20 {
            let t = (j as f64 * 0.618_033_988_749_894_8) % 1.0;
            let u = (j as f64 * 0.754_877_666_246_693) % 1.0;
            // interior: stay away from edges so the stencil fits
            let w = leaf.center
                + Complex64::new(
                    (2.0 * t - 1.0) * 0.8 * leaf.half_width_x,
                    (2.0 * u - 1.0) * 0.8 * leaf.half_width_y - 0.03,
                );
            let f = |w: Complex64| rep.eval(w).unwrap();
            let lap = (f(w + h) + f(w - h) + f(w + Complex64::new(0.0, h))
                + f(w - Complex64::new(0.0, h))
                - 4.0 * f(w))
                / (h * h);
            check("9", "harmonicity", lap.abs(), 1e-5);
        }
    }

    // contour independence: enlarging the upper contour must not change the
    // evaluated representation
    let curve = BoundaryCurve::straight();
    let opts_wide = Qb2xOptions {
        k_override: Some(40),
        upper_radius: 1.2,
        ..Qb2xOptions::default()
    };
    let rep_wide = build_dlp(&rho, &curve, &leaf, 30, 1e-12, &opts_wide).unwrap();
    let rep_base = &reps[0];
    let mut max_diff = 0.0f64;
    for &(x, y) in &[(0.0, -1.0 / 3.0), (0.3, -0.1), (-0.3, -0.6), (0.15, -0.45)] {
        let w = Complex64::new(x, y);
        max_diff = max_diff.max((rep_base.eval(w).unwrap() - rep_wide.eval(w).unwrap()).abs());
    }
    check("9", "contour independence", max_diff, 1e-12);

    // cross-oracle agreement on the straight segment
    let rho_poly = RealPolynomial::chebyshev(vec![1.0, 0.5, 0.25]);
    let mut cross = 0.0f64;
    for j in 0..100 {
        let t = (j as f64 * 0.618_033_988_749_894_8) % 1.0;
        let u = (j as f64 * 0.754_877_666_246_693) % 1.0;
        let w = leaf.center
            + Complex64::new(
                (2.0 * t - 1.0) * leaf.half_width_x,
                (2.0 * u - 1.0) * leaf.half_width_y - 0.002,
            );
        let a = oracle_dlp_straight(&rho_poly, w).unwrap().value;
        let b = oracle_adaptive(PotentialKind::Dlp, &rho, &curve, w, ORACLE_TOL)
            .unwrap()
            .value;
        cross = cross.max((a - b).abs());
    }
    check("9", "cross-oracle", cross, 1e-13);

    // Fourier extension invariants: conjugate symmetry and reconstruction
    let ext = fit_fourier_extension(|x: f64| x.cos().exp(), 20, DEFAULT_SVD_CUTOFF).unwrap();
    for p in 0..=20i64 {
        let diff = (ext.weight(p).conj() - ext.weight(-p)).norm();
        assert!(diff == 0.0, "criterion 9 FAIL: conjugate symmetry off by {diff:e}");
    }
    check("9", "extension residual", ext.fit_residual, 1e-13);
    let recon = (0..=100)
        .map(|j| {
            let x = -1.0 + j as f64 / 50.0;
            (ext.eval(x) - x.cos().exp()).abs()
        })
        .fold(0.0f64, f64::max);
    check("9", "extension reconstruction", recon, 1e-13);

    // root-finder residuals and analyticity of the root map
    let quart = quartic_curve();
    let mut residual = 0.0f64;
    let mut cauchy_riemann = 0.0f64;
    let hr = 1e-5;
    for j in 0..50 {
        let t = (j as f64 * 0.618_033_988_749_894_8) % 1.0;
        let u = (j as f64 * 0.754_877_666_246_693) % 1.0;
        let w = leaf.center
            + Complex64::new(
                (2.0 * t - 1.0) * 0.9 * leaf.half_width_x,
                (2.0 * u - 1.0) * 0.9 * leaf.half_width_y,
            );
        let root = find_root_near(&quart, w).unwrap();
        residual = residual.max((quart.lift(root) - w).norm());
        let f = |w: Complex64| find_root_near(&quart, w).unwrap();
        let dx = (f(w + hr) - f(w - hr)) / (2.0 * hr);
        let dy = (f(w + Complex64::new(0.0, hr)) - f(w - Complex64::new(0.0, hr)))
            / (2.0 * hr);
        cauchy_riemann = cauchy_riemann.max((dx + Complex64::new(0.0, 1.0) * dy).norm());
    }
    check("9", "root residual", residual, 1e-13);
    check("9", "Cauchy-Riemann", cauchy_riemann, 1e-6);

    report(
        "9",
        &format!(
            "harmonicity, contour independence {max_diff:.1e}, cross-oracle {cross:.1e}, \
             extension, roots {residual:.1e}, Cauchy-Riemann {cauchy_riemann:.1e}"
        ),
    );
}

#[test]
fn criterion_10_local_taylor_of_plane_wave() {
    // K=25 Taylor expansion of e^{i5z} about w0 = 1/2 + i/3:
    // c_k = (i5)^k e^{i5 w0} / k!
    let w0 = Complex64::new(0.5, 1.0 / 3.0);
    let i5 = Complex64::new(0.0, 5.0);
    let mut coeffs = Vec::with_capacity(26);
    let mut c = (i5 * w0).exp();
    coeffs.push(c);
    for k in 1..=25 {
        c *= i5 / k as f64;
        coeffs.push(c);
    }
    let mut worst = 0.0f64;
    let n = 101;
    for jy in 0..n {
        for jx in 0..n {
            let w = Complex64::new(jx as f64 / (n - 1) as f64, jy as f64 / (n - 1) as f64);
            if (w - w0).norm() > 0.35 {
                continue;
            }
            let taylor = coeffs
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * (w - w0) + c);
            let err = (taylor.re - harmonic_test_field(w)).abs();
            worst = worst.max(err);
        }
    }
    check("10", "K=25 Taylor of Re(e^{i5z})", worst, 1e-6);
    report("10", &format!("K=25 local Taylor max err {worst:.3e} <= 1e-6 within 0.35 of center"));
}
