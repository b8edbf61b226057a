//! Tail of the exponential series, `R_x(z) = e^z - sum_{n=0}^{x} z^n / n!`.
//!
//! The photon amplitudes multiply `R_x(z)` by `e^{-kappa t}` and by
//! `zeta^{-x}`, both of which can be astronomically large or small on their
//! own. The scale factor is therefore folded into every term in log space.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_TERMS: usize = 1_000_000;

/// `ln n!`, exact summation for small `n`, Stirling series beyond.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    if n < 32 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    let m = n as f64 + 1.0;
    let inv = 1.0 / m;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    (m - 0.5) * m.ln() - m + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// `e^{-damping} R_x(z)`.
pub fn r_function(x: usize, z: Complex64, damping: f64) -> Result<Complex64> {
    if damping < 0.0 {
        return Err(Error::InvalidArgument(format!("damping must be >= 0 (got {damping})")));
    }
    scaled_tail(x, z, Complex64::new(-damping, 0.0))
}

/// `e^{log_scale} sum_{n > x} z^n / n!` with each term evaluated as
/// `exp(n ln z - ln n! + log_scale)`.
///
/// When `x + 1 < |z|` the tail contains the largest terms of the series and
/// cancels heavily, so the complement `e^z - sum_{n <= x} z^n / n!` is
/// summed instead.
pub(crate) fn scaled_tail(x: usize, z: Complex64, log_scale: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let ln_z = z.ln();
    let abs_z = z.norm();
    let term = |n: usize| {
        let log_term = ln_z * n as f64 - ln_factorial(n) + log_scale;
        if log_term.re < -745.0 {
            Complex64::new(0.0, 0.0)
        } else {
            log_term.exp()
        }
    };
    if (x as f64 + 1.0) < abs_z {
        let head: Complex64 = (0..=x).map(term).sum();
        return Ok((z + log_scale).exp() - head);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for n in (x + 1)..(x + 1 + MAX_TERMS) {
        let t = term(n);
        sum += t;
        // remaining terms shrink at least geometrically with ratio r
        let r = abs_z / (n as f64 + 1.0);
        let bound = t.norm() * r / (1.0 - r);
        if bound <= 1e-16 * sum.norm() || bound < 1e-300 {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { terms: MAX_TERMS })
}
