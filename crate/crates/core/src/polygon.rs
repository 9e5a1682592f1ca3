//! Rotating given radii so that they sum to a prescribed complex number.
//!
//! The radii together with a closing side of length `|z|` form a closed
//! polygon. It is realised as a convex polygon inscribed in a circle: with
//! `x = 1/(2R)`, each side of length `L` subtends the central angle
//! `2 arcsin(L x)`, and `x` is the root of the closure condition. When the
//! centre lies outside the polygon the longest side subtends the reflex
//! complement instead.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CLOSURE_TOL: f64 = 1e-10;
const CHUNK: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiiSet {
    pub radii: Vec<f64>,
    /// Primes the radii belong to, when they come from a prime window.
    pub labels: Option<Vec<u64>>,
}

impl RadiiSet {
    pub fn new(radii: Vec<f64>, labels: Option<Vec<u64>>) -> Result<Self> {
        if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return Err(Error::invalid(format!("radii must be positive and finite, got {r}")));
        }
        if let Some(l) = &labels {
            if l.len() != radii.len() {
                return Err(Error::invalid(format!("{} labels for {} radii", l.len(), radii.len())));
            }
        }
        Ok(RadiiSet { radii, labels })
    }

    pub fn total(&self) -> f64 {
        sum_chunked(&self.radii, |r| r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleAssignment {
    pub thetas: Vec<f64>,
    pub target: Complex64,
    pub achieved: Complex64,
    pub residual: f64,
}

/// Deterministic parallel sum: fixed chunks, combined left to right.
fn sum_chunked<F>(xs: &[f64], f: F) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    let parts: Vec<f64> = xs.par_chunks(CHUNK).map(|c| c.iter().map(|&x| f(x)).sum()).collect();
    parts.iter().sum()
}

fn max_and_rest(radii: &[f64]) -> (usize, f64, f64) {
    let (idx, &max) =
        radii.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0))).expect("non-empty radii");
    (idx, max, sum_chunked(radii, |r| r) - max)
}

/// Whether the largest radius is at most the sum of the others.
pub fn check_dominance(radii: &RadiiSet) -> Result<bool> {
    if radii.radii.len() < 3 {
        return Err(Error::TooFewRadii(radii.radii.len()));
    }
    let (_, max, rest) = max_and_rest(&radii.radii);
    Ok(max <= rest)
}

/// Bisection for the largest `x` in `[lo, hi]` with `f(x) > 0`, assuming one sign change.
fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Central angles of the sides of the inscribed polygon.
fn central_angles(sides: &[f64]) -> Result<Vec<f64>> {
    let (imax, lmax, rest) = max_and_rest(sides);
    if lmax > rest * (1.0 + 1e-12) {
        return Err(Error::DominanceViolation { max: lmax, rest });
    }
    let x_max = 1.0 / lmax;
    let full = sum_chunked(sides, |l| (l * x_max).min(1.0).asin());
    let pi = std::f64::consts::PI;
    let x = if full >= pi {
        // centre inside: Σ arcsin(L x) = π
        bisect(|x| pi - sum_chunked(sides, |l| (l * x).min(1.0).asin()), 0.0, x_max)
    } else {
        // centre outside: Σ_{others} arcsin(L x) = arcsin(L_max x)
        bisect(|x| sum_chunked(sides, |l| (l * x).min(1.0).asin()) - 2.0 * (lmax * x).min(1.0).asin(), 0.0, x_max)
    };
    if !(x >= 0.0 && x <= x_max) {
        return Err(Error::RootFindFailure { lo: 0.0, hi: x_max, detail: format!("root {x} left the bracket") });
    }
    let mut angles: Vec<f64> = sides.par_iter().map(|&l| 2.0 * (l * x).min(1.0).asin()).collect();
    let others = sum_chunked(&angles, |a| a) - angles[imax];
    angles[imax] = 2.0 * pi - others;
    Ok(angles)
}

/// Angles `θ_n ∈ [0, 1)` with `Σ r_n e^{-2πiθ_n} = z`.
pub fn polygon_angles(radii: &RadiiSet, z: Complex64) -> Result<AngleAssignment> {
    if !check_dominance(radii)? {
        let (_, max, rest) = max_and_rest(&radii.radii);
        return Err(Error::DominanceViolation { max, rest });
    }
    let total = radii.total();
    if !(z.norm() <= total) {
        return Err(Error::TargetOutsideDisk { modulus: z.norm(), total });
    }
    let closing = z.norm() > 0.0;
    let mut sides = Vec::with_capacity(radii.radii.len() + 1);
    if closing {
        sides.push(z.norm());
    }
    sides.extend_from_slice(&radii.radii);
    let angles = central_angles(&sides)?;

    // direction of side k: ψ_k + α_k/2 + π/2, with ψ the compensated running sum
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut directions = Vec::with_capacity(sides.len());
    let (mut psi, mut comp) = (0.0f64, 0.0f64);
    for &a in &angles {
        directions.push(psi + comp + 0.5 * a + half_pi);
        let t = psi + a;
        comp += if psi.abs() >= a.abs() { (psi - t) + a } else { (a - t) + psi };
        psi = t;
    }
    // rotate so that the closing side points along -z (or the first radius along θ = 0)
    let shift = if closing { (-z).arg() - directions[0] } else { -directions[0] };
    let two_pi = 2.0 * std::f64::consts::PI;
    let offset = usize::from(closing);
    let thetas: Vec<f64> = directions[offset..]
        .iter()
        .map(|d| {
            let th = (-(d + shift) / two_pi).rem_euclid(1.0);
            // also maps -0.0 to 0.0
            if th >= 1.0 {
                0.0
            } else {
                th + 0.0
            }
        })
        .collect();
    let achieved = weighted_sum(&radii.radii, &thetas);
    let residual = (achieved - z).norm();
    if !(residual <= CLOSURE_TOL) {
        return Err(Error::RootFindFailure {
            lo: 0.0,
            hi: 1.0 / max_and_rest(&sides).1,
            detail: format!("closure residual {residual:e} exceeds {CLOSURE_TOL:e}"),
        });
    }
    Ok(AngleAssignment { thetas, target: z, achieved, residual })
}

/// `Σ r_n e^{-2πiθ_n}`, chunked for determinism.
pub(crate) fn weighted_sum(radii: &[f64], thetas: &[f64]) -> Complex64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let parts: Vec<Complex64> = radii
        .par_chunks(CHUNK)
        .zip(thetas.par_chunks(CHUNK))
        .map(|(r, th)| r.iter().zip(th).map(|(&r, &t)| Complex64::from_polar(r, -two_pi * t)).sum())
        .collect();
    parts.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(r: &[f64]) -> RadiiSet {
        RadiiSet::new(r.to_vec(), None).unwrap()
    }

    fn circ(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(1.0);
        d.min(1.0 - d)
    }

    #[test]
    fn dominance() {
        assert!(check_dominance(&set(&[1.0, 1.0, 1.0])).unwrap());
        assert!(!check_dominance(&set(&[5.0, 1.0, 1.0])).unwrap());
        assert!(matches!(check_dominance(&set(&[1.0, 1.0])), Err(Error::TooFewRadii(2))));
    }

    #[test]
    fn equilateral_closes() {
        let a = polygon_angles(&set(&[1.0, 1.0, 1.0]), Complex64::new(0.0, 0.0)).unwrap();
        assert!(a.residual < 1e-12);
        let mut d: Vec<f64> = a.thetas.iter().map(|t| (t - a.thetas[0]).rem_euclid(1.0)).collect();
        d.sort_by(f64::total_cmp);
        assert!(circ(d[1], 1.0 / 3.0) < 1e-12 && circ(d[2], 2.0 / 3.0) < 1e-12, "{d:?}");
    }

    #[test]
    fn aligned_boundary() {
        let a = polygon_angles(&set(&[1.0, 1.0, 1.0]), Complex64::new(3.0, 0.0)).unwrap();
        assert!(a.residual < 1e-12);
        assert!(a.thetas.iter().all(|&t| circ(t, 0.0) < 1e-7), "{:?}", a.thetas);
    }

    #[test]
    fn right_triangle() {
        let a = polygon_angles(&set(&[3.0, 4.0, 5.0]), Complex64::new(0.0, 0.0)).unwrap();
        assert!(a.residual < 1e-12);
        // the legs are perpendicular
        let d = circ(a.thetas[0], a.thetas[1]);
        assert!((d - 0.25).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            polygon_angles(&set(&[5.0, 1.0, 1.0]), Complex64::new(0.0, 0.0)),
            Err(Error::DominanceViolation { .. })
        ));
        assert!(matches!(
            polygon_angles(&set(&[1.0, 1.0, 1.0]), Complex64::new(3.5, 0.0)),
            Err(Error::TargetOutsideDisk { .. })
        ));
        assert!(RadiiSet::new(vec![1.0, -1.0, 1.0], None).is_err());
    }

    #[test]
    fn outside_centre_case() {
        // one long side forces the centre outside
        let a = polygon_angles(&set(&[1.9, 1.0, 1.0]), Complex64::new(0.05, 0.02)).unwrap();
        assert!(a.residual < 1e-12);
    }
}
