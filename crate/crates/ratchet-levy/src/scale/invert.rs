//! Numerical Laplace-transform inversion: fixed-Talbot contour with a
//! Bromwich-Euler fallback.
//!
//! The transforms inverted here (`1/(psi - q)` and `psi/(theta (psi - q))`)
//! have their rightmost singularity at the real root `Phi(q)`, so the contour
//! is sized to pass to the right of it. Node counts are picked for f64: the
//! fixed-Talbot roundoff amplification grows like `e^{2M/5}`, which caps the
//! usable `M` near 40-50 in double precision.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{LevyError, Result};

/// Inverts `fhat` at `t > 0`. `pole` is the rightmost real singularity.
pub fn invert<F: Fn(Complex64) -> Complex64>(fhat: &F, t: f64, pole: f64) -> Result<f64> {
    // r = 2M/(5t) must clear the pole with margin
    let m_min = (3.0 * pole.max(0.0) * t).ceil() as usize + 8;
    let m = m_min.max(32);
    if m > 52 {
        // Talbot would need a contour too wide for f64; try Euler alone.
        return euler(fhat, t, pole);
    }
    let v1 = talbot(fhat, t, m);
    let v2 = talbot(fhat, t, m + 6);
    let resid = (v1 - v2).abs();
    if resid <= 1e-9 * v2.abs().max(1.0) {
        Ok(v2)
    } else {
        euler(fhat, t, pole)
    }
}

/// Fixed-Talbot rule with `m` nodes.
fn talbot<F: Fn(Complex64) -> Complex64>(fhat: &F, t: f64, m: usize) -> f64 {
    let r = 2.0 * m as f64 / (5.0 * t);
    let mut sum = 0.5 * (r * t).exp() * fhat(Complex64::new(r, 0.0)).re;
    for k in 1..m {
        let theta = k as f64 * PI / m as f64;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        sum += ((s * t).exp() * fhat(s) * Complex64::new(1.0, sigma)).re;
    }
    sum * r / m as f64
}

/// Bromwich contour with alternating series and Euler (binomial) averaging.
fn euler<F: Fn(Complex64) -> Complex64>(fhat: &F, t: f64, pole: f64) -> Result<f64> {
    let a = f64::max(18.4, 2.6 * pole.max(0.0) * t);
    if a > 40.0 {
        return Err(LevyError::NumericalFailure(format!(
            "inversion contour parameter {a:.1} exceeds f64 headroom at t = {t}"
        )));
    }
    let n = 38usize;
    let m = 12usize;
    let x = a / (2.0 * t);
    let h = PI / t;
    let mut partial = Vec::with_capacity(m + 1);
    let mut sum = 0.5 * fhat(Complex64::new(x, 0.0)).re;
    for k in 1..=(n + m) {
        let term = fhat(Complex64::new(x, k as f64 * h)).re;
        sum += if k % 2 == 0 { term } else { -term };
        if k >= n {
            partial.push(sum);
        }
    }
    // binomial average of the last m+1 partial sums
    let mut acc = 0.0;
    let mut binom = 1.0;
    for (j, p) in partial.iter().enumerate() {
        acc += binom * p;
        binom = binom * (m - j) as f64 / (j + 1) as f64;
    }
    acc /= (2.0_f64).powi(m as i32);
    Ok(acc * (a / 2.0).exp() / t)
}
