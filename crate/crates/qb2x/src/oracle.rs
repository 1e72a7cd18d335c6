//! Independent reference evaluators for the layer potentials.
//!
//! Everything here deliberately avoids the expansion machinery: the straight
//! case reduces to closed forms by synthetic division, and the general case
//! uses globally adaptive Gauss-Legendre quadrature in the real boundary
//! parameter. These are the yardsticks the representations are tested against.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Qb2xError, Result};
use crate::expansion::{Density, PotentialKind};
use crate::fourier_ext::RealPolynomial;
use crate::geometry::BoundaryCurve;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
/// Targets closer than this to the boundary have a (near-)singular integrand
/// the adaptive rule cannot resolve reliably.
const ON_SEGMENT_DIST: f64 = 1e-12;
/// Cap on adaptive subdivisions.
const MAX_INTERVALS: usize = 20_000;

/// A reference value together with its accuracy bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Double layer potential over the straight segment s = 0, by synthetic
/// division: with q(x) = (rho(x) - rho(w)) / (x - w) a polynomial,
/// `int rho/(x - w) dx = int q dx + rho(w) (log(1 - w) - log(-1 - w))`
/// and `DLP = -(1/2pi) Im int rho/(x - w) dx`.
pub fn oracle_dlp_straight(rho: &RealPolynomial, w: Complex64) -> Result<ReferenceResult> {
    if w.im.abs() < ON_SEGMENT_DIST && w.re.abs() <= 1.0 + ON_SEGMENT_DIST {
        return Err(Qb2xError::OnSegment);
    }
    let mono = rho.to_monomial();
    let n = mono.coefficients.len();
    // synthetic division of rho by (x - w): quotient coefficients (complex)
    // and remainder rho(w)
    let mut quotient = vec![Complex64::new(0.0, 0.0); n.saturating_sub(1)];
    let mut rem = Complex64::new(0.0, 0.0);
    for (j, &c) in mono.coefficients.iter().enumerate().rev() {
        if j == n - 1 {
            rem = Complex64::new(c, 0.0);
        } else {
            quotient[j] = rem;
            rem = rem * w + c;
        }
    }
    // int_{-1}^{1} q(x) dx: odd powers cancel
    let mut integral = Complex64::new(0.0, 0.0);
    for (j, &q) in quotient.iter().enumerate() {
        if j % 2 == 0 {
            integral += q * 2.0 / (j as f64 + 1.0);
        }
    }
    integral += rem
        * ((Complex64::new(1.0, 0.0) - w).ln() - (Complex64::new(-1.0, 0.0) - w).ln());
    Ok(ReferenceResult {
        value: -integral.im / TWO_PI,
        error_estimate: 1e-15 * (1.0 + integral.norm()),
        evaluations: 0,
    })
}

/// Heap entry for the globally adaptive rule; ordered by error estimate.
struct Interval {
    error: f64,
    a: f64,
    b: f64,
    value: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// 15-point Gauss-Legendre rule on [-1, 1], independent of the contour
/// module's quadrature.
fn gauss_legendre_15() -> &'static [(f64, f64); 15] {
    use std::sync::OnceLock;
    static RULE: OnceLock<[(f64, f64); 15]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = 15usize;
        let mut rule = [(0.0, 0.0); 15];
        for k in 0..n {
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            rule[n - 1 - k] = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

fn gl15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    gauss_legendre_15()
        .iter()
        .map(|&(x, w)| w * f(m + h * x))
        .sum::<f64>()
        * h
}

/// Globally adaptive Gauss-Legendre integration of `f` over [-1, 1]: the
/// interval with the largest error estimate (parent vs. two halves) is split
/// until the summed estimates drop below `tol` relative to the result.
fn adaptive_integral(f: &impl Fn(f64) -> f64, tol: f64) -> Result<ReferenceResult> {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    let push = |heap: &mut BinaryHeap<Interval>, a: f64, b: f64, evals: &mut usize| {
        let whole = gl15(f, a, b);
        let m = 0.5 * (a + b);
        let halves = gl15(f, a, m) + gl15(f, m, b);
        *evals += 45;
        heap.push(Interval { error: (whole - halves).abs(), a, b, value: halves });
    };
    // seed with a few intervals so sharply peaked integrands are spotted
    for j in 0..4 {
        push(&mut heap, -1.0 + 0.5 * j as f64, -0.5 + 0.5 * j as f64, &mut evaluations);
    }
    loop {
        let total: f64 = heap.iter().map(|iv| iv.value).sum();
        let err: f64 = heap.iter().map(|iv| iv.error).sum();
        if err <= tol * total.abs().max(1.0) {
            return Ok(ReferenceResult { value: total, error_estimate: err, evaluations });
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Qb2xError::MaxSubdivisions { limit: MAX_INTERVALS });
        }
        let worst = heap.pop().expect("heap seeded non-empty");
        if worst.b - worst.a < 1e-15 {
            return Err(Qb2xError::QuadratureNotConverged { last_change: worst.error });
        }
        let m = 0.5 * (worst.a + worst.b);
        push(&mut heap, worst.a, m, &mut evaluations);
        push(&mut heap, m, worst.b, &mut evaluations);
    }
}

fn distance_to_curve(curve: &BoundaryCurve, w: Complex64) -> f64 {
    (0..=512)
        .map(|j| {
            let x = -1.0 + j as f64 / 256.0;
            (w - Complex64::new(x, curve.height(x))).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Layer potential at `w` by globally adaptive quadrature in the boundary
/// parameter. Independent of the expansion path: no Fourier extensions,
/// contours, or root solves.
pub fn oracle_adaptive(
    kind: PotentialKind,
    rho: &Density,
    curve: &BoundaryCurve,
    w: Complex64,
    tol: f64,
) -> Result<ReferenceResult> {
    assert!(tol > 0.0 && tol < 1.0);
    if distance_to_curve(curve, w) < ON_SEGMENT_DIST {
        return Err(Qb2xError::OnSegment);
    }
    let integrand = |x: f64| -> f64 {
        let z = Complex64::new(x, curve.height(x));
        let sp = curve.slope(x);
        match kind {
            PotentialKind::Dlp => {
                let kernel = 1.0 / (w - z);
                (sp * rho.eval(x) * kernel.re + rho.eval(x) * kernel.im) / TWO_PI
            }
            PotentialKind::Slp => {
                (w - z).norm().ln() * rho.eval(x) * (1.0 + sp * sp).sqrt() / TWO_PI
            }
        }
    };
    adaptive_integral(&integrand, tol)
}

/// Harmonic reference field Re(e^{i 5 w}); exactly harmonic, so interior
/// values must match their own local Taylor re-expansion.
pub fn harmonic_test_field(w: Complex64) -> f64 {
    (Complex64::new(0.0, 5.0) * w).exp().re
}
