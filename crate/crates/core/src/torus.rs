//! Prime-indexed polylogarithm sums over torus points, and the construction of
//! a torus point whose sum approximates a prescribed complex number.
//!
//! For `θ = (θ_p)` the sum is `Σ_p Li_{m+1}(p^{-σ} e^{-2πiθ_p}) / (log p)^m`.
//! The base point alternates `θ = 0, 1/2, 0, 1/2, …` along the primes, and its
//! (conditionally convergent) sum is `γ_{m,σ}`. To reach a target `a`, primes
//! `p ≤ U` keep the base point and a window `U < p ≤ N` is rotated so that the
//! first harmonics add up to `a - γ_{m,σ}`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polygon::{polygon_angles, AngleAssignment, RadiiSet};
use crate::polylog::{polylog_real, polylog_series};
use crate::primes::PrimeTable;

const CHUNK: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaValue {
    pub value: f64,
    /// Estimated size of the omitted primes `p > tail_cut`.
    pub tail_estimate: f64,
    pub tail_cut: f64,
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma >= 0.5) || !sigma.is_finite() {
        return Err(Error::invalid(format!("sigma must be at least 1/2, got {sigma}")));
    }
    Ok(())
}

/// Term of the base-point sum for the `n`-th prime (0-based).
fn base_term(m: u32, sigma: f64, n: usize, log_p: f64) -> f64 {
    let r = (-sigma * log_p).exp();
    let z = if n.is_multiple_of(2) { r } else { -r };
    polylog_real(m + 1, z) / log_p.powi(m as i32)
}

/// Prefix sums of the base-point series over the first `count` primes.
fn base_prefix_sums(m: u32, sigma: f64, primes: &PrimeTable, count: usize) -> Vec<f64> {
    let logs = &primes.logs()[..count];
    let chunks: Vec<Vec<f64>> = logs
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, chunk)| chunk.iter().enumerate().map(|(i, &lp)| base_term(m, sigma, c * CHUNK + i, lp)).collect())
        .collect();
    let mut out = Vec::with_capacity(count + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for chunk in chunks {
        for v in chunk {
            acc += v;
            out.push(acc);
        }
    }
    out
}

/// `1.3 ∫_u^∞ x^{-kσ} / (log x)^{m+1} dx`, an upper estimate of
/// `Σ_{p>u} p^{-kσ} / (log p)^m` for `kσ ≥ 1`.
fn prime_power_integral(k: u32, m: u32, sigma: f64, u: f64) -> f64 {
    let lu = u.ln();
    let e = k as f64 * sigma - 1.0;
    let integral = if e.abs() < 1e-12 {
        1.0 / (m as f64 * lu.powi(m as i32))
    } else {
        (-e * lu).exp() / (e * lu.powi(m as i32 + 1))
    };
    1.3 * integral
}

/// Bound on `Σ_{p>u}` of the base-point series. Odd harmonics alternate in
/// sign along the primes, so the first omitted term bounds them; even
/// harmonics do not.
fn base_tail_estimate(m: u32, sigma: f64, u: f64, next_prime: f64) -> f64 {
    let lp = next_prime.ln();
    let mut est = 0.0;
    for k in 1..=60u32 {
        let kf = k as f64;
        let term = if k % 2 == 1 {
            (-kf * sigma * lp).exp() / lp.powi(m as i32)
        } else {
            prime_power_integral(k, m, sigma, u)
        } / kf.powi(m as i32 + 1);
        est += term;
        if term < 1e-18 {
            break;
        }
    }
    est
}

/// Bound on the harmonics `k ≥ 2` of any torus point over primes `p > u`.
fn harmonic_bound(m: u32, sigma: f64, u: f64) -> f64 {
    let mut est = 0.0;
    for k in 2..=60u32 {
        let term = prime_power_integral(k, m, sigma, u) / (k as f64).powi(m as i32 + 1);
        est += term;
        if term < 1e-18 {
            break;
        }
    }
    est
}

/// `γ_{m,σ}` summed over primes up to `tail_cut`.
pub fn gamma_m_sigma(m: u32, sigma: f64, tail_cut: f64, primes: &PrimeTable) -> Result<GammaValue> {
    check_sigma(sigma)?;
    if m == 0 {
        return Err(Error::invalid("order m must be positive"));
    }
    if !(tail_cut >= 1e3) {
        return Err(Error::invalid(format!("tail_cut must be at least 1000, got {tail_cut}")));
    }
    if tail_cut > primes.limit() as f64 {
        return Err(Error::CutoffExceeded { x: tail_cut, limit: primes.limit() });
    }
    let count = primes.count_up_to(tail_cut);
    let sums = base_prefix_sums(m, sigma, primes, count);
    let next = primes.primes().get(count).map_or(tail_cut, |&p| p as f64);
    Ok(GammaValue { value: sums[count], tail_estimate: base_tail_estimate(m, sigma, tail_cut, next), tail_cut })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaPipelineResult {
    pub m: u32,
    pub sigma: f64,
    pub epsilon: f64,
    /// Primes `p ≤ u` keep the base point.
    pub u: u64,
    /// Largest prime of the rotated window.
    pub n: u64,
    pub gamma_value: f64,
    /// The primes `≤ n`, aligned with `theta2.thetas`.
    pub primes: Vec<u64>,
    /// Torus point over all primes `≤ n`; `achieved` is `final_sum`.
    pub theta2: AngleAssignment,
    pub polygon_residual: f64,
    pub final_sum: Complex64,
    pub final_error: f64,
}

/// Torus point over the primes `≤ N` whose polylogarithm sum is within `ε` of `a`.
pub fn construct_theta(
    m: u32,
    sigma: f64,
    a: Complex64,
    epsilon: f64,
    primes: &PrimeTable,
) -> Result<ThetaPipelineResult> {
    if !(0.5..1.0).contains(&sigma) {
        return Err(Error::invalid(format!("sigma must be in [1/2, 1), got {sigma}")));
    }
    if m == 0 || m > 3 {
        return Err(Error::invalid(format!("order m must be in 1..=3, got {m}")));
    }
    if !(epsilon > 0.0) || !a.re.is_finite() || !a.im.is_finite() {
        return Err(Error::invalid("epsilon must be positive and the target finite"));
    }
    let limit = primes.limit();
    let total = primes.len();
    let sums = base_prefix_sums(m, sigma, primes, total);
    let last = *primes.primes().last().expect("sieve has primes") as f64;
    let gamma_tail = base_tail_estimate(m, sigma, limit as f64, last);
    let gamma = sums[total];
    let target = a - gamma;
    let radius = |i: usize| {
        let lp = primes.logs()[i];
        (-sigma * lp).exp() / lp.powi(m as i32)
    };

    let mut u = 10u64;
    let mut last_detail = String::from("no cutoff U satisfies the tail conditions");
    while u < limit {
        let below = primes.count_up_to(u as f64);
        // error of stopping the base point at U, and the higher harmonics in the window
        let e1 = (gamma - sums[below]).abs() + gamma_tail;
        let e2 = harmonic_bound(m, sigma, u as f64);
        if e1 >= epsilon / 4.0 || e2 >= epsilon / 4.0 {
            u *= 10;
            continue;
        }
        // grow the window until it reaches the target and satisfies dominance
        let mut acc = 0.0;
        let mut end = below;
        let first = radius(below);
        while end < total {
            acc += radius(end);
            end += 1;
            if end - below >= 3 && acc >= target.norm() && first <= acc - first {
                break;
            }
        }
        if !(end - below >= 3 && acc >= target.norm() && first <= acc - first) {
            return Err(Error::WindowExhausted {
                limit,
                detail: format!("window above U = {u} reaches total radius {acc:.6} but needs {:.6}", target.norm()),
            });
        }
        let window = RadiiSet::new((below..end).map(radius).collect(), Some(primes.primes()[below..end].to_vec()))?;
        let poly = polygon_angles(&window, target)?;
        let mut thetas: Vec<f64> = (0..below).map(|i| if i % 2 == 0 { 0.0 } else { 0.5 }).collect();
        thetas.extend_from_slice(&poly.thetas);
        let window_sum = angle_sum(m, sigma, &primes.logs()[below..end], &poly.thetas);
        let final_sum = Complex64::new(sums[below], 0.0) + window_sum;
        let final_error = (final_sum - a).norm();
        if final_error < epsilon {
            return Ok(ThetaPipelineResult {
                m,
                sigma,
                epsilon,
                u,
                n: primes.primes()[end - 1],
                gamma_value: gamma,
                primes: primes.primes()[..end].to_vec(),
                theta2: AngleAssignment { thetas, target: a, achieved: final_sum, residual: final_error },
                polygon_residual: poly.residual,
                final_sum,
                final_error,
            });
        }
        last_detail = format!("at U = {u} the assembled sum misses the target by {final_error:e}");
        u *= 10;
    }
    Err(Error::WindowExhausted { limit, detail: last_detail })
}

fn angle_sum(m: u32, sigma: f64, logs: &[f64], thetas: &[f64]) -> Complex64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let parts: Vec<Complex64> = logs
        .par_chunks(CHUNK)
        .zip(thetas.par_chunks(CHUNK))
        .map(|(ls, ts)| {
            ls.iter()
                .zip(ts)
                .map(|(&lp, &th)| {
                    let z = Complex64::from_polar((-sigma * lp).exp(), -two_pi * th);
                    polylog_series(m + 1, z) / lp.powi(m as i32)
                })
                .sum::<Complex64>()
        })
        .collect();
    parts.iter().sum()
}

/// `Σ_p Li_{m+1}(p^{-σ} e^{-2πiθ_p}) / (log p)^m` over an assignment prime → θ.
pub fn s_sum(assignment: &BTreeMap<u64, f64>, sigma: f64, m: u32) -> Result<Complex64> {
    check_sigma(sigma)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut sum = Complex64::new(0.0, 0.0);
    for (&p, &th) in assignment {
        if p < 2 {
            return Err(Error::invalid(format!("{p} is not a prime")));
        }
        if !(0.0..1.0).contains(&th) {
            return Err(Error::invalid(format!("theta {th} for p = {p} outside [0, 1)")));
        }
        let lp = (p as f64).ln();
        let z = Complex64::from_polar((-sigma * lp).exp(), -two_pi * th);
        sum += polylog_series(m + 1, z) / lp.powi(m as i32);
    }
    Ok(sum)
}

/// Torus average of `|S_{M,N}|²` over the primes with index in `(M, N]`:
/// `Σ Li_{2m+2}(p^{-2σ}) / (log p)^{2m}`.
pub fn second_moment_s(m: u32, sigma: f64, lower: usize, upper: usize, primes: &PrimeTable) -> Result<f64> {
    check_sigma(sigma)?;
    if lower > upper || upper > primes.len() {
        return Err(Error::invalid(format!(
            "need M <= N <= {} prime indices, got M = {lower}, N = {upper}",
            primes.len()
        )));
    }
    Ok(primes.logs()[lower..upper]
        .iter()
        .map(|&lp| polylog_real(2 * m + 2, (-2.0 * sigma * lp).exp()) / lp.powi(2 * m as i32))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::sieve_primes;

    #[test]
    fn gamma_first_terms() {
        let primes = sieve_primes(1000).unwrap();
        let (m, sigma) = (1, 0.8);
        let t2 = base_term(m, sigma, 0, 2f64.ln());
        assert!((t2 - polylog_real(2, 2f64.powf(-sigma)) / 2f64.ln()).abs() < 1e-15);
        let t3 = base_term(m, sigma, 1, 3f64.ln());
        assert!((t3 - polylog_real(2, -(3f64.powf(-sigma))) / 3f64.ln()).abs() < 1e-15);
        assert!(gamma_m_sigma(m, sigma, 500.0, &primes).is_err());
        assert!(gamma_m_sigma(m, sigma, 2000.0, &primes).is_err());
    }

    #[test]
    fn gamma_converges_fast_at_two() {
        let primes = sieve_primes(1_000_000).unwrap();
        let a = gamma_m_sigma(1, 2.0, 1e5, &primes).unwrap();
        let b = gamma_m_sigma(1, 2.0, 1e6, &primes).unwrap();
        assert!((a.value - b.value).abs() < 1e-9);
        assert!((a.value - b.value).abs() <= a.tail_estimate);
    }

    #[test]
    fn s_sum_basics() {
        let empty = BTreeMap::new();
        assert_eq!(s_sum(&empty, 2.0, 1).unwrap(), Complex64::new(0.0, 0.0));
        let all_zero: BTreeMap<u64, f64> = [2, 3, 5, 7].iter().map(|&p| (p, 0.0)).collect();
        let v = s_sum(&all_zero, 2.0, 1).unwrap();
        let want: f64 = [2f64, 3.0, 5.0, 7.0].iter().map(|p| polylog_real(2, p.powi(-2)) / p.ln()).sum();
        assert!((v.re - want).abs() < 1e-15 && v.im.abs() < 1e-15);
        let bad: BTreeMap<u64, f64> = [(2, 1.0)].into_iter().collect();
        assert!(s_sum(&bad, 2.0, 1).is_err());
    }

    #[test]
    fn second_moment_single_prime() {
        let primes = sieve_primes(100).unwrap();
        let v = second_moment_s(1, 0.5, 0, 1, &primes).unwrap();
        let l2 = 2f64.ln();
        let want: f64 = (1..80).map(|k| 1.0 / ((k as f64).powi(4) * 2f64.powi(k) * l2 * l2)).sum();
        assert!((v - want).abs() < 1e-13);
        assert_eq!(second_moment_s(1, 0.5, 3, 3, &primes).unwrap(), 0.0);
    }

    #[test]
    fn zero_target_pipeline() {
        let primes = sieve_primes(1_000_000).unwrap();
        let g = gamma_m_sigma(1, 0.8, 1e6, &primes).unwrap();
        let r = construct_theta(1, 0.8, Complex64::new(g.value, 0.0), 0.05, &primes).unwrap();
        assert!(r.final_error < 0.05);
        assert_eq!(r.theta2.thetas.len(), r.primes.len());
    }

    #[test]
    fn unreachable_precision() {
        let primes = sieve_primes(1_000_000).unwrap();
        let r = construct_theta(1, 0.8, Complex64::new(1.0, 1.0), 1e-9, &primes);
        assert!(matches!(r, Err(Error::WindowExhausted { .. })));
    }
}
