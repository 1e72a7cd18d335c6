//! QB2X: expansion-based evaluation of 2D Laplace layer potentials close to
//! the boundary.
//!
//! A single or double layer potential over a boundary segment is rewritten,
//! inside a target leaf box, as a short local Taylor expansion about the box
//! center plus a modified plane-wave sum. The split comes from replacing the
//! boundary density by a Fourier extension and closing each frequency's
//! integral through a contour on its decaying side: contour integrals feed
//! the local coefficients, residues feed the plane waves. Both pieces are
//! smooth, so evaluation anywhere in the box is uniformly accurate — no
//! near-singular quadrature at the targets.

pub mod contour;
pub mod error;
pub mod expansion;
pub mod fourier_ext;
mod gamma;
pub mod geometry;
mod series;
pub mod oracle;

pub use error::{Qb2xError, Result};
pub use expansion::{
    build_dlp, build_slp, estimate_qbx_terms, eval_rep, integral_rep, Density, IntegralRep,
    PotentialKind, Qb2xOptions, Qb2xRepresentation,
};
pub use fourier_ext::{
    antiderivative_extension, cheb_to_fourier_map, fit_fourier_extension, Basis,
    ExtensionFitter, FourierExtension, RealPolynomial,
};
pub use geometry::{
    compute_r_max, curvature, find_root_near, select_k, BoundaryCurve, LeafBox,
};
pub use oracle::{harmonic_test_field, oracle_adaptive, oracle_dlp_straight, ReferenceResult};
