//! Dense complex power-series arithmetic, truncated at a fixed order.
//!
//! Used to convert residues at the far roots of z + i s(z) = w0 into local
//! Taylor coefficients: the root's trajectory z_j(w) is obtained by series
//! reversion of the lifted polynomial, and the residue function
//! e^{i p z_j(w)} / (1 + i s'(z_j(w))) is then assembled by composition,
//! exponentiation, and reciprocal of series in (w - w0).

use num_complex::Complex64;

fn zero(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

/// Truncated product of two series (orders 0..=k).
pub fn mul(a: &[Complex64], b: &[Complex64], k: usize) -> Vec<Complex64> {
    let mut out = zero(k + 1);
    for (i, &ai) in a.iter().enumerate().take(k + 1) {
        for (j, &bj) in b.iter().enumerate().take(k + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Reciprocal of a series with non-zero constant term.
pub fn recip(a: &[Complex64], k: usize) -> Vec<Complex64> {
    assert!(a[0].norm() > 0.0, "series reciprocal needs a_0 != 0");
    let mut out = zero(k + 1);
    out[0] = 1.0 / a[0];
    for n in 1..=k {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=n.min(a.len() - 1) {
            acc += a[j] * out[n - j];
        }
        out[n] = -acc / a[0];
    }
    out
}

/// exp of a series with zero constant term, via E' = S' E.
pub fn exp(s: &[Complex64], k: usize) -> Vec<Complex64> {
    assert!(s[0].norm() == 0.0, "series exp needs s_0 = 0");
    let mut out = zero(k + 1);
    out[0] = Complex64::new(1.0, 0.0);
    for n in 1..=k {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=n.min(s.len() - 1) {
            acc += j as f64 * s[j] * out[n - j];
        }
        out[n] = acc / n as f64;
    }
    out
}

/// Compose a polynomial (coefficients in its argument) with a series:
/// `sum_n coeffs[n] * a(u)^n`, truncated at order k. Horner on series.
pub fn compose_poly(coeffs: &[Complex64], a: &[Complex64], k: usize) -> Vec<Complex64> {
    let mut out = zero(k + 1);
    for &c in coeffs.iter().rev() {
        out = mul(&out, a, k);
        out[0] += c;
    }
    out
}

/// Reversion: given `h(delta) = sum_{n>=1} b[n] delta^n` with b[1] != 0, find
/// the series `a(u)` (a[0] = 0) with `h(a(u)) = u` through order k.
///
/// Order-by-order: with a known through order m, the order-(m+1) coefficient
/// of h(a) is b[1]*a[m+1] plus terms involving only lower orders.
pub fn revert(b: &[Complex64], k: usize) -> Vec<Complex64> {
    assert!(b.len() >= 2 && b[1].norm() > 0.0, "reversion needs b_1 != 0");
    let mut a = zero(k + 1);
    if k == 0 {
        return a;
    }
    a[1] = 1.0 / b[1];
    for m in 2..=k {
        // h(a) with a_m still zero; its order-m coefficient is the defect
        let h_of_a = compose_poly(b, &a, m);
        a[m] = -h_of_a[m] / b[1];
    }
    a
}

/// Taylor coefficients of the polynomial with the given monomial coefficients
/// about the point `z0`: `p(z0 + delta) = sum_n out[n] delta^n`.
pub fn shift_polynomial(coeffs: &[Complex64], z0: Complex64) -> Vec<Complex64> {
    // repeated synthetic division by (z - z0), in place
    let mut work = coeffs.to_vec();
    let n = work.len();
    for i in 0..n.saturating_sub(1) {
        for j in (i..n - 1).rev() {
            let t = work[j + 1] * z0;
            work[j] += t;
        }
    }
    work
}
