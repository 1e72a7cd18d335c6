//! Integration contours closing the boundary segment [-1, 1] from above or
//! below, with panel-based Gauss-Legendre quadrature for smooth complex
//! integrands.
//!
//! The upper contour handles non-negative frequencies (where e^{ipz} decays
//! in the upper half plane); the lower rectangle handles negative ones.

use num_complex::Complex64;

use crate::error::{Qb2xError, Result};
use crate::geometry::BoundaryCurve;

/// Nodes per Gauss-Legendre panel.
const PANEL_ORDER: usize = 16;
/// Initial panel count on the semicircular arc.
const ARC_PANELS: usize = 16;
/// Smallest graded panel length at the lower-rectangle corners.
const GRADING_MIN: f64 = 1e-3;
/// Relative tolerance for panel-doubling convergence. Roundoff in the node
/// sums stalls successive levels a few ulps apart, so this sits one order
/// above machine epsilon.
const MOMENT_TOL: f64 = 1e-14;
/// Maximum number of panel doublings.
const MAX_DOUBLINGS: usize = 6;
/// Default depth of the lower rectangle; e^{-45} is below double noise for
/// the slowest negative mode.
pub const DEFAULT_LOWER_DEPTH: f64 = 45.0;

/// Which of the two closing contours this is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourKind {
    UpperSemicircle,
    LowerRectangle,
}

#[derive(Debug, Clone)]
enum Segment {
    /// Circular arc `radius * e^{i theta}`, theta from `theta0` to `theta1`.
    Arc { radius: f64, theta0: f64, theta1: f64 },
    /// Straight segment from `from` to `to`.
    Line { from: Complex64, to: Complex64 },
}

impl Segment {
    fn point(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Arc { radius, theta0, theta1 } => {
                let theta = theta0 + (theta1 - theta0) * t;
                radius * Complex64::new(theta.cos(), theta.sin())
            }
            Segment::Line { from, to } => from + (to - from) * t,
        }
    }

    fn velocity(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Arc { radius, theta0, theta1 } => {
                let theta = theta0 + (theta1 - theta0) * t;
                Complex64::new(0.0, 1.0)
                    * (theta1 - theta0)
                    * radius
                    * Complex64::new(theta.cos(), theta.sin())
            }
            Segment::Line { from, to } => to - from,
        }
    }

    fn length(&self) -> f64 {
        match *self {
            Segment::Arc { radius, theta0, theta1 } => radius * (theta1 - theta0).abs(),
            Segment::Line { from, to } => (to - from).norm(),
        }
    }
}

/// A panel is a parameter sub-interval of one segment.
#[derive(Debug, Clone, Copy)]
struct Panel {
    seg: usize,
    t0: f64,
    t1: f64,
}

/// Piecewise-smooth integration contour with Gauss-Legendre panels.
#[derive(Debug, Clone)]
pub struct Contour {
    kind: ContourKind,
    segments: Vec<Segment>,
    panels: Vec<Panel>,
    radius: f64,
    depth: f64,
}

/// Unit upper semicircle from +1 to -1.
pub fn build_upper_contour() -> Contour {
    build_upper_contour_with_radius(1.0)
}

/// Upper semicircular contour of the given radius. For radius > 1 the arc is
/// joined to the segment endpoints by stubs on the real axis, keeping the
/// loop through [-1, 1] closed.
pub fn build_upper_contour_with_radius(radius: f64) -> Contour {
    assert!(radius >= 1.0);
    let mut segments = Vec::new();
    let mut panels = Vec::new();
    if radius > 1.0 {
        segments.push(Segment::Line {
            from: Complex64::new(1.0, 0.0),
            to: Complex64::new(radius, 0.0),
        });
        for j in 0..4 {
            panels.push(Panel { seg: 0, t0: j as f64 / 4.0, t1: (j + 1) as f64 / 4.0 });
        }
    }
    let arc_idx = segments.len();
    segments.push(Segment::Arc { radius, theta0: 0.0, theta1: std::f64::consts::PI });
    for j in 0..ARC_PANELS {
        panels.push(Panel {
            seg: arc_idx,
            t0: j as f64 / ARC_PANELS as f64,
            t1: (j + 1) as f64 / ARC_PANELS as f64,
        });
    }
    if radius > 1.0 {
        let idx = segments.len();
        segments.push(Segment::Line {
            from: Complex64::new(-radius, 0.0),
            to: Complex64::new(-1.0, 0.0),
        });
        for j in 0..4 {
            panels.push(Panel { seg: idx, t0: j as f64 / 4.0, t1: (j + 1) as f64 / 4.0 });
        }
    }
    Contour { kind: ContourKind::UpperSemicircle, segments, panels, radius, depth: 0.0 }
}

/// Graded breakpoints on [0, len]: lengths start at `GRADING_MIN` next to 0
/// and double away from it.
fn graded_breakpoints(len: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut step = GRADING_MIN;
    let mut at = 0.0;
    while at + step < len {
        at += step;
        pts.push(at);
        step *= 2.0;
    }
    pts.push(len);
    pts
}

/// Lower rectangular contour: from +1 down to +1 - iL, across the bottom,
/// and back up to -1. Together with the segment [-1, 1] it encloses the
/// leaf box clockwise.
pub fn build_lower_contour(depth: f64) -> Contour {
    assert!(depth > 0.0);
    let segments = vec![
        Segment::Line { from: Complex64::new(1.0, 0.0), to: Complex64::new(1.0, -depth) },
        Segment::Line { from: Complex64::new(1.0, -depth), to: Complex64::new(-1.0, -depth) },
        Segment::Line { from: Complex64::new(-1.0, -depth), to: Complex64::new(-1.0, 0.0) },
    ];
    let mut panels = Vec::new();
    // right side: graded away from the corner at +1 (t = 0)
    let bp = graded_breakpoints(depth);
    for w in bp.windows(2) {
        panels.push(Panel { seg: 0, t0: w[0] / depth, t1: w[1] / depth });
    }
    // bottom: uniform
    for j in 0..8 {
        panels.push(Panel { seg: 1, t0: j as f64 / 8.0, t1: (j + 1) as f64 / 8.0 });
    }
    // left side: graded toward the corner at -1 (t = 1)
    for w in bp.windows(2) {
        panels.push(Panel { seg: 2, t0: 1.0 - w[1] / depth, t1: 1.0 - w[0] / depth });
    }
    Contour { kind: ContourKind::LowerRectangle, segments, panels, radius: 0.0, depth }
}

impl Contour {
    pub fn kind(&self) -> ContourKind {
        self.kind
    }

    /// Arc radius (upper contour only).
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Rectangle depth L (lower contour only).
    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn arc_length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    /// Points spread along the contour, proportionally to segment length.
    pub fn sample_points(&self, n: usize) -> Vec<Complex64> {
        let total: f64 = self.arc_length();
        let mut pts = Vec::with_capacity(n + self.segments.len());
        for seg in &self.segments {
            let m = ((n as f64 * seg.length() / total).ceil() as usize).max(2);
            for j in 0..=m {
                pts.push(seg.point(j as f64 / m as f64));
            }
        }
        pts
    }

    /// Quadrature nodes `(z, weight)` with every panel split into 2^level
    /// sub-panels; `sum w_j f(z_j)` approximates the contour integral of f.
    fn nodes(&self, level: usize) -> Vec<(Complex64, Complex64)> {
        let rule = gauss_legendre_16();
        let splits = 1usize << level;
        let mut out = Vec::with_capacity(self.panels.len() * splits * PANEL_ORDER);
        for p in &self.panels {
            let seg = &self.segments[p.seg];
            let dt = (p.t1 - p.t0) / splits as f64;
            for s in 0..splits {
                let a = p.t0 + dt * s as f64;
                for &(x, w) in rule.iter() {
                    let t = a + dt * 0.5 * (x + 1.0);
                    out.push((seg.point(t), seg.velocity(t) * (w * dt * 0.5)));
                }
            }
        }
        out
    }

    /// Integrate an arbitrary integrand at the given refinement level.
    pub fn integrate(&self, level: usize, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.nodes(level).into_iter().map(|(z, w)| w * f(z)).sum()
    }

    /// Integrate over a single segment (0-based) at the given level.
    pub fn integrate_segment(
        &self,
        seg_idx: usize,
        level: usize,
        f: impl Fn(Complex64) -> Complex64,
    ) -> Complex64 {
        let rule = gauss_legendre_16();
        let splits = 1usize << level;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in self.panels.iter().filter(|p| p.seg == seg_idx) {
            let seg = &self.segments[p.seg];
            let dt = (p.t1 - p.t0) / splits as f64;
            for s in 0..splits {
                let a = p.t0 + dt * s as f64;
                for &(x, w) in rule.iter() {
                    let t = a + dt * 0.5 * (x + 1.0);
                    acc += seg.velocity(t) * (w * dt * 0.5) * f(seg.point(t));
                }
            }
        }
        acc
    }

    /// Integrate with panel doubling until two successive levels agree to
    /// `MOMENT_TOL` relative, or fail after `MAX_DOUBLINGS`.
    pub fn integrate_converged(
        &self,
        f: impl Fn(Complex64) -> Complex64,
    ) -> Result<Complex64> {
        let mut prev = self.integrate(0, &f);
        let mut last_change = f64::INFINITY;
        for level in 1..=MAX_DOUBLINGS {
            let cur = self.integrate(level, &f);
            last_change = (cur - prev).norm();
            if last_change <= MOMENT_TOL * (1.0 + cur.norm()) {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(Qb2xError::QuadratureNotConverged { last_change })
    }

    fn check_frequency(&self, p: i64) -> Result<()> {
        let ok = match self.kind {
            ContourKind::UpperSemicircle => p >= 0,
            ContourKind::LowerRectangle => p < 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Qb2xError::WrongContourForFrequency {
                p,
                contour: match self.kind {
                    ContourKind::UpperSemicircle => "upper",
                    ContourKind::LowerRectangle => "lower",
                },
            })
        }
    }
}

/// Contour moment `int e^{ipz} / (z + i s(z) - w0)^{k+1} dz`.
///
/// Non-negative p requires the upper contour and negative p the lower one;
/// the opposite pairing makes the integrand grow exponentially.
pub fn contour_moment(
    contour: &Contour,
    curve: &BoundaryCurve,
    p: i64,
    k: usize,
    w0: Complex64,
) -> Result<Complex64> {
    contour.check_frequency(p)?;
    let i = Complex64::new(0.0, 1.0);
    contour.integrate_converged(|z| {
        (i * p as f64 * z).exp() / (curve.lift(z) - w0).powi(k as i32 + 1)
    })
}

/// All local moments `c_k = sum_p w_p int e^{ipz} / (z + i s(z) - w0)^{k+1} dz`
/// for k = 0..=k_max, sharing one set of quadrature nodes across (p, k).
pub fn moments_batch(
    contour: &Contour,
    curve: &BoundaryCurve,
    modes: &[(i64, Complex64)],
    k_max: usize,
    w0: Complex64,
) -> Result<Vec<Complex64>> {
    for &(p, _) in modes {
        contour.check_frequency(p)?;
    }
    if modes.is_empty() {
        return Ok(vec![Complex64::new(0.0, 0.0); k_max + 1]);
    }
    let i = Complex64::new(0.0, 1.0);
    let eval_level = |level: usize| -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); k_max + 1];
        for (z, wt) in contour.nodes(level) {
            let wave: Complex64 = modes
                .iter()
                .map(|&(p, w)| w * (i * p as f64 * z).exp())
                .sum();
            if wave.norm() == 0.0 {
                continue;
            }
            let g = 1.0 / (curve.lift(z) - w0);
            let mut gk = g;
            for c in acc.iter_mut() {
                *c += wt * wave * gk;
                gk *= g;
            }
        }
        acc
    };
    // A relative roundoff of eps in the kernel becomes (k+1) * eps in its
    // (k+1)-th power, so the achievable doubling agreement degrades linearly
    // with the moment order; scale the tolerance accordingly.
    let tol = MOMENT_TOL * (k_max as f64 + 1.0);
    let mut prev = eval_level(0);
    let mut last_change = f64::INFINITY;
    for level in 1..=MAX_DOUBLINGS {
        let cur = eval_level(level);
        last_change = cur
            .iter()
            .zip(&prev)
            .map(|(c, p)| (c - p).norm() / (1.0 + c.norm()))
            .fold(0.0f64, f64::max);
        if last_change <= tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Qb2xError::QuadratureNotConverged { last_change })
}

/// 16-point Gauss-Legendre rule on [-1, 1], computed once by Newton
/// iteration on the Legendre recurrence.
fn gauss_legendre_16() -> &'static [(f64, f64); PANEL_ORDER] {
    use std::sync::OnceLock;
    static RULE: OnceLock<[(f64, f64); PANEL_ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = PANEL_ORDER;
        let mut rule = [(0.0, 0.0); PANEL_ORDER];
        for k in 0..n {
            // Chebyshev-point initial guess
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
