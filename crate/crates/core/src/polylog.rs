//! Polylogarithm `Li_s(z) = Σ z^n / n^s` inside the disc `|z| ≤ 0.95`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_MODULUS: f64 = 0.95;
const TAIL_TOL: f64 = 1e-14;
const MAX_TERMS: usize = 10_000;

pub fn polylog(order: u32, z: Complex64) -> Result<Complex64> {
    if order == 0 {
        return Err(Error::invalid("polylog order must be at least 1"));
    }
    let r = z.norm();
    if !(r <= MAX_MODULUS) {
        return Err(Error::ConvergenceDomain { modulus: r, max: MAX_MODULUS });
    }
    Ok(polylog_series(order, z))
}

/// The series itself; callers guarantee `|z| ≤ 0.95`.
pub(crate) fn polylog_series(order: u32, z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zn = z;
    let mut rn = r;
    for n in 1..=MAX_TERMS {
        let nf = n as f64;
        sum += zn / nf.powi(order as i32);
        // remaining terms bounded by a geometric series
        let next = rn * r;
        if next / ((nf + 1.0).powi(order as i32) * (1.0 - r)) <= TAIL_TOL {
            break;
        }
        zn *= z;
        rn = next;
    }
    sum
}

/// Real-argument variant used in the prime sums.
pub(crate) fn polylog_real(order: u32, x: f64) -> f64 {
    polylog_series(order, Complex64::new(x, 0.0)).re
}
