//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced while building or evaluating QB2X representations.
#[derive(Debug, Error)]
pub enum Qb2xError {
    /// A sampled function returned NaN or infinity.
    #[error("function produced a non-finite sample at x = {x}")]
    NonFiniteSample { x: f64 },

    /// The boundary height function violates s(0) = s'(0) = 0.
    #[error("curve is not in the normalized frame: |s(0)| = {s0:e}, |s'(0)| = {ds0:e}")]
    CurveNotNormalized { s0: f64, ds0: f64 },

    /// A second root of z + i s(z) - w = 0 sits too close to the target region.
    #[error("spurious root of z + i s(z) - w = 0 at distance {distance} from the target")]
    SpuriousNearbyRoot { distance: f64 },

    /// Newton polishing of a root did not reach the residual tolerance.
    #[error("root polishing stalled with residual {residual:e}")]
    RootNotConverged { residual: f64 },

    /// The separation ratio r_max is too close to 1 for the expansion to converge.
    #[error("contour touches the target box: r_max = {r_max}")]
    ContourTouchesBox { r_max: f64 },

    /// Frequency sign is incompatible with the contour kind.
    #[error("frequency p = {p} cannot be integrated on the {contour} contour")]
    WrongContourForFrequency { p: i64, contour: &'static str },

    /// Panel doubling stopped before the moment stabilized.
    #[error("contour quadrature did not converge (last change {last_change:e})")]
    QuadratureNotConverged { last_change: f64 },

    /// Target lies on the open segment (-1, 1) of the real axis.
    #[error("target lies on the boundary segment")]
    OnSegment,

    /// Adaptive quadrature exceeded the subdivision limit.
    #[error("adaptive quadrature exceeded {limit} subdivisions")]
    MaxSubdivisions { limit: usize },
}

pub type Result<T> = std::result::Result<T, Qb2xError>;
