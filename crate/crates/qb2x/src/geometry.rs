//! Boundary segment geometry: the height-function curve z = x + i s(x),
//! the target leaf box, roots of z + i s(z) - w = 0, curvature, the
//! separation ratio r_max, and truncation-length selection.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{Contour, ContourKind};
use crate::error::{Qb2xError, Result};
use crate::fourier_ext::RealPolynomial;

/// Tolerance on the normalized-frame constraints s(0) = s'(0) = 0.
const FRAME_TOL: f64 = 1e-12;
/// A second root of z + i s(z) - w = 0 within this distance of the target
/// makes the choice of residue branch ambiguous.
const SPURIOUS_ROOT_DIST: f64 = 0.5;
/// Separation ratios at or above this make the local expansion useless.
const R_MAX_LIMIT: f64 = 0.95;
/// Contour sample count for the r_max search.
const R_MAX_SAMPLES: usize = 1024;

/// Boundary segment z(x) = x + i s(x) for x in [-1, 1], with s(0) = s'(0) = 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RealPolynomial", into = "RealPolynomial")]
pub struct BoundaryCurve {
    height: RealPolynomial,
    #[allow(dead_code)]
    flatness: f64,
    slope_mono: RealPolynomial,
}

impl TryFrom<RealPolynomial> for BoundaryCurve {
    type Error = Qb2xError;
    fn try_from(height: RealPolynomial) -> Result<Self> {
        BoundaryCurve::new(height)
    }
}

impl From<BoundaryCurve> for RealPolynomial {
    fn from(c: BoundaryCurve) -> RealPolynomial {
        c.height
    }
}

impl BoundaryCurve {
    pub fn new(height: RealPolynomial) -> Result<Self> {
        let slope_mono = height.derivative().to_monomial();
        let s0 = height.eval(0.0);
        let ds0 = slope_mono.eval(0.0);
        if s0.abs() > FRAME_TOL || ds0.abs() > FRAME_TOL {
            return Err(Qb2xError::CurveNotNormalized { s0: s0.abs(), ds0: ds0.abs() });
        }
        let flatness = (0..=256)
            .map(|j| height.eval(-1.0 + j as f64 / 128.0).abs())
            .fold(0.0f64, f64::max);
        Ok(Self { height, flatness, slope_mono })
    }

    /// The flat segment s = 0.
    pub fn straight() -> Self {
        Self::new(RealPolynomial::zero()).expect("zero curve is normalized")
    }

    pub fn height_fn(&self) -> &RealPolynomial {
        &self.height
    }

    /// s(x) at a real parameter.
    pub fn height(&self, x: f64) -> f64 {
        self.height.eval(x)
    }

    /// s'(x) at a real parameter.
    pub fn slope(&self, x: f64) -> f64 {
        self.slope_mono.eval(x)
    }

    /// s evaluated at a complex argument (analytic continuation of the
    /// height polynomial).
    pub fn height_complex(&self, z: Complex64) -> Complex64 {
        self.height.eval_complex(z)
    }

    /// s' at a complex argument.
    pub fn slope_complex(&self, z: Complex64) -> Complex64 {
        self.slope_mono.eval_complex(z)
    }

    /// The map z -> z + i s(z).
    pub fn lift(&self, z: Complex64) -> Complex64 {
        z + Complex64::new(0.0, 1.0) * self.height_complex(z)
    }

    /// Max |s| over [-1, 1]; advisory flatness metric.
    pub fn flatness(&self) -> f64 {
        self.flatness
    }

    /// True when s is identically zero.
    pub fn is_straight(&self) -> bool {
        self.height.to_monomial().coefficients.iter().all(|&c| c == 0.0)
    }
}

/// Axis-aligned target box below the curve, centered at `center`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LeafBox {
    pub center: Complex64,
    #[serde(rename = "hx")]
    pub half_width_x: f64,
    #[serde(rename = "hy")]
    pub half_width_y: f64,
}

impl LeafBox {
    pub fn new(center: Complex64, half_width_x: f64, half_width_y: f64) -> Self {
        assert!(half_width_x > 0.0 && half_width_y > 0.0);
        Self { center, half_width_x, half_width_y }
    }

    /// The box used throughout the experiments: [-1/3, 1/3] x [-2/3, 0].
    pub fn reference() -> Self {
        Self::new(Complex64::new(0.0, -1.0 / 3.0), 1.0 / 3.0, 1.0 / 3.0)
    }

    pub fn corners(&self) -> [Complex64; 4] {
        let (hx, hy) = (self.half_width_x, self.half_width_y);
        [
            self.center + Complex64::new(hx, hy),
            self.center + Complex64::new(-hx, hy),
            self.center + Complex64::new(hx, -hy),
            self.center + Complex64::new(-hx, -hy),
        ]
    }

    pub fn contains(&self, w: Complex64) -> bool {
        (w.re - self.center.re).abs() <= self.half_width_x
            && (w.im - self.center.im).abs() <= self.half_width_y
    }

    /// Worst-case violation of the below-the-curve condition along the top
    /// edge (positive when the top edge pokes above the curve somewhere).
    pub fn below_violation(&self, curve: &BoundaryCurve) -> f64 {
        let top = self.center.im + self.half_width_y;
        (0..=128)
            .map(|j| {
                let x = self.center.re - self.half_width_x
                    + 2.0 * self.half_width_x * j as f64 / 128.0;
                top - curve.height(x)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Monomial coefficients of the lifted polynomial z + i s(z) - w.
pub fn lift_polynomial(curve: &BoundaryCurve, w: Complex64) -> Vec<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let s = curve.height_fn().to_monomial();
    let mut coeffs: Vec<Complex64> = s.coefficients.iter().map(|&c| i * c).collect();
    if coeffs.len() < 2 {
        coeffs.resize(2, Complex64::new(0.0, 0.0));
    }
    coeffs[0] -= w;
    coeffs[1] += 1.0;
    coeffs
}

/// All roots of the polynomial z + i s(z) - w = 0, by Aberth-Ehrlich
/// iteration with Newton polishing.
pub fn lift_roots(curve: &BoundaryCurve, w: Complex64) -> Result<Vec<Complex64>> {
    let mut coeffs = lift_polynomial(curve, w);
    while coeffs.len() > 2 && coeffs.last().unwrap().norm() == 0.0 {
        coeffs.pop();
    }
    let deg = coeffs.len() - 1;
    if deg == 1 {
        return Ok(vec![-coeffs[0] / coeffs[1]]);
    }

    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            d = d * z + v;
            v = v * z + c;
        }
        (v, d)
    };

    // Cauchy-bound radius, initial guesses spread on a circle.
    let lead = coeffs[deg].norm();
    let radius = 1.0
        + coeffs[..deg]
            .iter()
            .map(|c| c.norm() / lead)
            .fold(0.0f64, f64::max);
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.39;
            radius * Complex64::new(theta.cos(), theta.sin())
        })
        .collect();

    for _ in 0..200 {
        let mut max_step = 0.0f64;
        for k in 0..deg {
            let (v, d) = eval(roots[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let newton = v / d;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != k)
                .map(|j| 1.0 / (roots[k] - roots[j]))
                .sum();
            let step = newton / (1.0 - newton * repulsion);
            roots[k] -= step;
            max_step = max_step.max(step.norm() / (1.0 + roots[k].norm()));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    // Newton polish
    for r in roots.iter_mut() {
        for _ in 0..5 {
            let (v, d) = eval(*r);
            if d.norm() == 0.0 {
                break;
            }
            *r -= v / d;
        }
    }
    Ok(roots)
}

/// The root of z + i s(z) - w = 0 nearest to `w`.
///
/// Far roots are legitimate (their residues are folded into the local
/// coefficients at build time), but a second root close to the target makes
/// the near branch ambiguous and is rejected.
pub fn find_root_near(curve: &BoundaryCurve, w: Complex64) -> Result<Complex64> {
    let roots = lift_roots(curve, w)?;
    let mut nearest = roots[0];
    let mut best = f64::INFINITY;
    for &r in &roots {
        let d = (r - w).norm();
        if d < best {
            best = d;
            nearest = r;
        }
    }
    let residual = (curve.lift(nearest) - w).norm();
    if residual > 1e-14 * (1.0 + w.norm()) {
        return Err(Qb2xError::RootNotConverged { residual });
    }
    for &r in &roots {
        if r != nearest {
            let d = (r - w).norm();
            if d < SPURIOUS_ROOT_DIST {
                return Err(Qb2xError::SpuriousNearbyRoot { distance: d });
            }
        }
    }
    Ok(nearest)
}

/// Signed curvature s''(x) / (1 + s'(x)^2)^{3/2} of the height-function curve.
pub fn curvature(curve: &BoundaryCurve, x: f64) -> f64 {
    let d1 = curve.slope(x);
    let d2 = curve.height_fn().derivative().derivative().eval(x);
    d2 / (1.0 + d1 * d1).powf(1.5)
}

/// Separation ratio r_max = |(w - w0) / (z + i s(z) - w0)| between the target
/// box and the integration contour.
///
/// The numerator is maximized over the four box corners. For the lower
/// rectangle the denominator is minimized over dense contour samples (the
/// worst separation); for the upper semicircle the ratio is taken at the arc
/// apex, matching the reference values the truncation calibration was done
/// against.
pub fn compute_r_max(contour: &Contour, curve: &BoundaryCurve, leaf: &LeafBox) -> Result<f64> {
    let w0 = leaf.center;
    let num = leaf
        .corners()
        .iter()
        .map(|w| (w - w0).norm())
        .fold(0.0f64, f64::max);
    let denom = match contour.kind() {
        ContourKind::UpperSemicircle => {
            let apex = Complex64::new(0.0, contour.radius());
            (curve.lift(apex) - w0).norm()
        }
        ContourKind::LowerRectangle => contour
            .sample_points(R_MAX_SAMPLES)
            .into_iter()
            .map(|z| (curve.lift(z) - w0).norm())
            .fold(f64::INFINITY, f64::min),
    };
    let r_max = num / denom;
    if r_max >= R_MAX_LIMIT {
        return Err(Qb2xError::ContourTouchesBox { r_max });
    }
    Ok(r_max)
}

/// Smallest K with `weight_sum * r_max^{K+1} <= eps`, clamped to [8, 80].
pub fn select_k(r_max: f64, weight_sum: f64, eps: f64) -> usize {
    assert!(r_max > 0.0 && r_max < 1.0);
    assert!(eps > 0.0 && eps < 1.0);
    let mut k = 0usize;
    while weight_sum * r_max.powi(k as i32 + 1) > eps && k < 80 {
        k += 1;
    }
    k.clamp(8, 80)
}
