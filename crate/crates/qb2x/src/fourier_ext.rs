//! Fourier extensions of smooth real functions on [-1, 1].
//!
//! A non-periodic function on [-1, 1] is approximated by a Fourier series
//! with fundamental period 2*pi (integer frequencies), fitted by truncated-SVD
//! least squares on an oversampled endpoint-clustered grid. The extension weights feed
//! directly into the contour and residue formulas, where the mode with
//! frequency `p` carries the node `lambda_p = i p`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Qb2xError, Result};

/// Oversampling factor of the least-squares grid relative to 2P+1 unknowns.
const OVERSAMPLING: usize = 8;
/// Density factor of the residual check grid relative to the fit grid.
const RESIDUAL_GRID_FACTOR: usize = 4;
/// Default relative singular-value cutoff.
pub const DEFAULT_SVD_CUTOFF: f64 = 1e-14;

/// Compensated accumulator (double-double): basis changes between monomial
/// and Chebyshev coefficients cancel heavily, so products are accumulated
/// with their exact rounding errors carried along.
#[derive(Debug, Clone, Copy, Default)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    /// Accumulate `a * b` exactly (up to the final double-double rounding).
    fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        let p_err = a.mul_add(b, -p);
        // two-sum of hi and p
        let s = self.hi + p;
        let bb = s - self.hi;
        let s_err = (self.hi - (s - bb)) + (p - bb);
        let lo = self.lo + s_err + p_err;
        // renormalize
        let hi = s + lo;
        self.lo = lo - (hi - s);
        self.hi = hi;
    }

    fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

/// Polynomial basis for [`RealPolynomial`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Chebyshev,
    Monomial,
}

/// A real polynomial on [-1, 1], stored as coefficients in either the
/// Chebyshev or the monomial basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPolynomial {
    pub basis: Basis,
    pub coefficients: Vec<f64>,
}

impl RealPolynomial {
    pub fn new(basis: Basis, coefficients: Vec<f64>) -> Self {
        assert!(!coefficients.is_empty(), "polynomial needs a coefficient");
        assert!(
            coefficients.iter().all(|c| c.is_finite()),
            "polynomial coefficients must be finite"
        );
        Self { basis, coefficients }
    }

    pub fn monomial(coefficients: Vec<f64>) -> Self {
        Self::new(Basis::Monomial, coefficients)
    }

    pub fn chebyshev(coefficients: Vec<f64>) -> Self {
        Self::new(Basis::Chebyshev, coefficients)
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        Self::monomial(vec![0.0])
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Evaluate at a real point. Clenshaw recurrence for Chebyshev
    /// coefficients, Horner for monomial ones.
    pub fn eval(&self, x: f64) -> f64 {
        match self.basis {
            Basis::Monomial => self
                .coefficients
                .iter()
                .rev()
                .fold(0.0, |acc, &c| acc * x + c),
            Basis::Chebyshev => {
                let mut b1 = 0.0;
                let mut b2 = 0.0;
                for &c in self.coefficients.iter().skip(1).rev() {
                    let b = 2.0 * x * b1 - b2 + c;
                    b2 = b1;
                    b1 = b;
                }
                x * b1 - b2 + self.coefficients[0]
            }
        }
    }

    /// Evaluate at a complex point using the monomial form.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.to_monomial()
            .coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Monomial coefficients of this polynomial. The Chebyshev monomial
    /// coefficients are exact integers (i128 recurrence) and the
    /// multiply-accumulate runs in compensated double-double arithmetic, so
    /// the only losses are the final roundings of the outputs.
    pub fn to_monomial(&self) -> RealPolynomial {
        match self.basis {
            Basis::Monomial => self.clone(),
            Basis::Chebyshev => {
                let n = self.coefficients.len();
                let mut acc = vec![DoubleDouble::default(); n];
                // T_{k+1} = 2 x T_k - T_{k-1}, exact in integers
                let mut t_prev: Vec<i128> = vec![1];
                let mut t_cur: Vec<i128> = vec![0, 1];
                for (k, &c) in self.coefficients.iter().enumerate() {
                    let t_k: &[i128] = match k {
                        0 => &t_prev,
                        1 => &t_cur,
                        _ => {
                            let mut next = vec![0i128; k + 1];
                            for (j, &t) in t_cur.iter().enumerate() {
                                next[j + 1] += 2 * t;
                            }
                            for (j, &t) in t_prev.iter().enumerate() {
                                next[j] -= t;
                            }
                            t_prev = std::mem::replace(&mut t_cur, next);
                            &t_cur
                        }
                    };
                    for (j, &t) in t_k.iter().enumerate() {
                        acc[j].add_product(c, t as f64);
                    }
                }
                RealPolynomial::monomial(acc.iter().map(DoubleDouble::value).collect())
            }
        }
    }

    /// Chebyshev coefficients of this polynomial, via the expansion of x^n
    /// in the Chebyshev basis. Binomials are computed exactly in integers and
    /// the accumulation is compensated, mirroring [`Self::to_monomial`].
    pub fn to_chebyshev(&self) -> RealPolynomial {
        match self.basis {
            Basis::Chebyshev => self.clone(),
            Basis::Monomial => {
                let n = self.coefficients.len();
                let mut acc = vec![DoubleDouble::default(); n];
                for (deg, &c) in self.coefficients.iter().enumerate() {
                    // x^deg = 2^{1-deg} sum' C(deg, (deg-k)/2) T_k, k = deg, deg-2, ...
                    let scale = if deg == 0 { 1.0 } else { 0.5f64.powi(deg as i32 - 1) };
                    let mut k = deg as i64;
                    while k >= 0 {
                        let m = (deg as i64 - k) / 2;
                        let mut binom: u128 = 1;
                        for j in 0..m {
                            binom = binom * (deg as u128 - j as u128) / (j as u128 + 1);
                        }
                        let half = if k == 0 && deg > 0 { 0.5 } else { 1.0 };
                        // binom < 2^53 for the degrees in play and the powers
                        // of two are exact, so the basis entry itself is exact
                        acc[k as usize].add_product(c, binom as f64 * scale * half);
                        k -= 2;
                    }
                }
                RealPolynomial::chebyshev(acc.iter().map(DoubleDouble::value).collect())
            }
        }
    }

    /// Derivative, computed on the monomial form.
    pub fn derivative(&self) -> RealPolynomial {
        let mono = self.to_monomial();
        if mono.coefficients.len() == 1 {
            return RealPolynomial::monomial(vec![0.0]);
        }
        let coeffs = mono
            .coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &c)| j as f64 * c)
            .collect();
        RealPolynomial::monomial(coeffs)
    }
}

/// A truncated Fourier series `sum_{p=-P}^{P} w_p e^{i p x}` fitted to a
/// function on [-1, 1], periodic with fundamental period 2*pi.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FourierExtension {
    /// Maximum frequency P.
    #[serde(rename = "P")]
    pub max_freq: usize,
    /// Weights ordered p = -P..P.
    pub weights: Vec<Complex64>,
    /// Max absolute deviation from the target on the dense check grid.
    pub fit_residual: f64,
}

impl FourierExtension {
    /// Build from explicit weights ordered p = -P..P.
    pub fn from_weights(weights: Vec<Complex64>, fit_residual: f64) -> Self {
        assert!(weights.len() % 2 == 1, "weights must cover p = -P..P");
        let max_freq = weights.len() / 2;
        Self { max_freq, weights, fit_residual }
    }

    /// Weight of frequency `p`.
    pub fn weight(&self, p: i64) -> Complex64 {
        self.weights[(p + self.max_freq as i64) as usize]
    }

    /// Iterate over (p, w_p) pairs.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let p0 = self.max_freq as i64;
        self.weights.iter().enumerate().map(move |(j, &w)| (j as i64 - p0, w))
    }

    /// Evaluate the series at a real point.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_complex(Complex64::new(x, 0.0)).re
    }

    /// Evaluate the series at a complex point.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        self.modes().map(|(p, w)| w * (i * p as f64 * z).exp()).sum()
    }

    /// l1 norm of the weights, used by the truncation-length selection.
    pub fn weight_l1(&self) -> f64 {
        self.weights.iter().map(|w| w.norm()).sum()
    }
}

fn equispaced(n: usize) -> Vec<f64> {
    (0..n).map(|j| -1.0 + 2.0 * j as f64 / (n - 1) as f64).collect()
}

/// Chebyshev-clustered sample points on [-1, 1]. Clustering the fit grid at
/// the endpoints buys two to three digits over equispaced sampling: the
/// least-squares residual for smooth data then reaches machine precision.
fn clustered(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| (std::f64::consts::PI * j as f64 / (n - 1) as f64).cos())
        .collect()
}

/// Reusable least-squares fitter for a fixed P: the design matrix SVD is
/// computed once and shared across right-hand sides.
pub struct ExtensionFitter {
    max_freq: usize,
    grid: Vec<f64>,
    check_grid: Vec<f64>,
    svd: nalgebra::SVD<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    sv_threshold: f64,
}

impl ExtensionFitter {
    pub fn new(max_freq: usize, svd_cutoff: f64) -> Self {
        assert!(svd_cutoff > 0.0 && svd_cutoff < 1.0, "cutoff must be in (0,1)");
        let cols = 2 * max_freq + 1;
        let rows = OVERSAMPLING * cols;
        let grid = clustered(rows.max(2));
        let check_grid = equispaced(RESIDUAL_GRID_FACTOR * rows.max(2));
        let i = Complex64::new(0.0, 1.0);
        let a = DMatrix::from_fn(grid.len(), cols, |r, c| {
            let p = c as f64 - max_freq as f64;
            (i * p * grid[r]).exp()
        });
        let svd = a.svd(true, true);
        let sv_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        Self {
            max_freq,
            grid,
            check_grid,
            svd,
            sv_threshold: svd_cutoff * sv_max,
        }
    }

    pub fn fit(&self, f: &dyn Fn(f64) -> f64) -> Result<FourierExtension> {
        for &x in self.grid.iter().chain(self.check_grid.iter()) {
            if !f(x).is_finite() {
                return Err(Qb2xError::NonFiniteSample { x });
            }
        }
        let b = DVector::from_iterator(
            self.grid.len(),
            self.grid.iter().map(|&x| Complex64::new(f(x), 0.0)),
        );
        let sol = self
            .svd
            .solve(&b, self.sv_threshold)
            .expect("SVD solve on precomputed factorization");
        let mut weights: Vec<Complex64> = sol.iter().cloned().collect();
        // Real data gives a conjugate-symmetric least-squares problem; enforce
        // the symmetry exactly against truncation noise.
        let n = weights.len();
        for j in 0..=self.max_freq {
            let avg = 0.5 * (weights[self.max_freq + j] + weights[n - 1 - self.max_freq - j].conj());
            weights[self.max_freq + j] = avg;
            weights[n - 1 - self.max_freq - j] = avg.conj();
        }
        let ext = FourierExtension::from_weights(weights, 0.0);
        let fit_residual = self
            .check_grid
            .iter()
            .map(|&x| (ext.eval_complex(Complex64::new(x, 0.0)) - f(x)).norm())
            .fold(0.0f64, f64::max);
        Ok(FourierExtension { fit_residual, ..ext })
    }
}

/// Fit the Fourier extension of `f` with maximum frequency `max_freq`.
///
/// The least-squares system is solved on an endpoint-clustered grid with 8x
/// oversampling via truncated SVD; singular values below
/// `svd_cutoff * sigma_max` are dropped. The recorded residual is measured
/// on a 4x denser grid.
pub fn fit_fourier_extension(
    f: impl Fn(f64) -> f64,
    max_freq: usize,
    svd_cutoff: f64,
) -> Result<FourierExtension> {
    ExtensionFitter::new(max_freq, svd_cutoff).fit(&f)
}

/// Translation map from Chebyshev coefficients to Fourier-extension weights.
///
/// Column n holds the weights of the extension of T_n; the matrix has shape
/// (2P+1) x (N+1). Applying it to a Chebyshev coefficient vector equals
/// fitting the recombined polynomial directly.
pub fn cheb_to_fourier_map(max_degree: usize, max_freq: usize) -> Result<DMatrix<Complex64>> {
    assert!(max_freq >= 1, "map needs P >= 1");
    let fitter = ExtensionFitter::new(max_freq, DEFAULT_SVD_CUTOFF);
    let mut m = DMatrix::zeros(2 * max_freq + 1, max_degree + 1);
    for n in 0..=max_degree {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        let tn = RealPolynomial::chebyshev(coeffs);
        let ext = fitter.fit(&|x| tn.eval(x))?;
        for (r, &w) in ext.weights.iter().enumerate() {
            m[(r, n)] = w;
        }
    }
    Ok(m)
}

/// A particular antiderivative of the fitted function: the oscillatory part
/// `sum_{p != 0} w_p / (i p) e^{i p x}` plus the separate linear term
/// `w_0 * x`, returned as (extension, linear coefficient).
pub fn antiderivative_extension(ext: &FourierExtension) -> (FourierExtension, f64) {
    let i = Complex64::new(0.0, 1.0);
    let weights = ext
        .modes()
        .map(|(p, w)| if p == 0 { Complex64::new(0.0, 0.0) } else { w / (i * p as f64) })
        .collect();
    let linear = ext.weight(0).re;
    (FourierExtension::from_weights(weights, ext.fit_residual), linear)
}
