//! Dirichlet-polynomial approximations of η̃_m and their mean-square error.
//!
//! `Σ_{p≤X} Li_{m+1}(p^{-s}) / (log p)^m` expands to the von Mangoldt sum over
//! `n ≤ X` plus the prime powers `p^k > X` with `p ≤ X`; the three functions
//! below compute each piece independently.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eta::{eta_tilde_weighted, QuadSpec};
use crate::polylog::polylog_series;
use crate::primes::PrimeTable;
use crate::zeros::ZeroTable;
use crate::zeta::check_guard;

/// Lower end of the mean-square integral.
pub const MEAN_SQUARE_START: f64 = 14.0;

fn check_args(sigma: f64, t: f64, x: f64, primes: &PrimeTable) -> Result<()> {
    if !(sigma >= 0.5) || !sigma.is_finite() {
        return Err(Error::invalid(format!("sigma must be at least 1/2, got {sigma}")));
    }
    if !t.is_finite() || x.is_nan() {
        return Err(Error::invalid("non-finite argument"));
    }
    if x > primes.limit() as f64 {
        return Err(Error::CutoffExceeded { x, limit: primes.limit() });
    }
    Ok(())
}

/// `Σ_{p≤X} Li_{m+1}(p^{-σ-it}) / (log p)^m`.
pub fn dirichlet_li_sum(m: u32, sigma: f64, t: f64, x: f64, primes: &PrimeTable) -> Result<Complex64> {
    check_args(sigma, t, x, primes)?;
    let n = primes.count_up_to(x);
    Ok(primes.logs()[..n]
        .iter()
        .map(|&lp| {
            let z = Complex64::from_polar((-sigma * lp).exp(), -t * lp);
            polylog_series(m + 1, z) / lp.powi(m as i32)
        })
        .sum())
}

/// `Σ_{2≤n≤X} Λ(n) / (n^{σ+it} (log n)^{m+1})`.
pub fn mangoldt_sum(m: u32, sigma: f64, t: f64, x: f64) -> Complex64 {
    if !(x >= 2.0) {
        return Complex64::new(0.0, 0.0);
    }
    let n_max = x.floor() as usize;
    // smallest prime factor sieve
    let mut spf = vec![0usize; n_max + 1];
    for i in 2..=n_max {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n_max {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (n, &p) in spf.iter().enumerate().skip(2) {
        let mut q = n;
        while q % p == 0 {
            q /= p;
        }
        if q != 1 {
            continue;
        }
        let ln_n = (n as f64).ln();
        let lambda = (p as f64).ln();
        let n_s = Complex64::from_polar((-sigma * ln_n).exp(), -t * ln_n);
        sum += n_s * (lambda / ln_n.powi(m as i32 + 1));
    }
    sum
}

/// `Σ_{p≤X} Σ_{k: p^k > X} p^{-k(σ+it)} / (k^{m+1} (log p)^m)`.
pub fn li_vs_mangoldt_gap(m: u32, sigma: f64, t: f64, x: f64, primes: &PrimeTable) -> Result<Complex64> {
    check_args(sigma, t, x, primes)?;
    let n = primes.count_up_to(x);
    let mut sum = Complex64::new(0.0, 0.0);
    for (&p, &lp) in primes.primes()[..n].iter().zip(primes.logs()) {
        // first k with p^k > X, in exact integer arithmetic
        let bound = x.floor() as u128;
        let mut k = 1u32;
        let mut pk = p as u128;
        while pk <= bound {
            pk *= p as u128;
            k += 1;
        }
        let r = (-sigma * lp).exp();
        let denom_log = lp.powi(m as i32);
        loop {
            let kf = k as f64;
            let modulus = r.powi(k as i32);
            let term = Complex64::from_polar(modulus, -kf * t * lp) / (kf.powi(m as i32 + 1) * denom_log);
            sum += term;
            // the rest is at most a geometric series in r
            if modulus * r / ((1.0 - r) * denom_log * (kf + 1.0).powi(m as i32 + 1)) < 1e-17 {
                break;
            }
            k += 1;
        }
    }
    Ok(sum)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSquareReport {
    pub m: u32,
    pub sigma: f64,
    pub x: f64,
    pub t_max: f64,
    pub grid_step: f64,
    pub mse: f64,
    /// `mse / (X^{1-2σ} / (log X)^{2m})`.
    pub bound_ratio: f64,
    pub skipped: usize,
    pub total: usize,
}

impl MeanSquareReport {
    pub fn skipped_fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.skipped as f64 / self.total as f64
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn mean_square_error(
    m: u32,
    sigma: f64,
    x: f64,
    t_max: f64,
    grid_step: f64,
    table: &ZeroTable,
    quad: &QuadSpec,
    primes: &PrimeTable,
) -> Result<MeanSquareReport> {
    Ok(mean_square_sweep(m, sigma, &[x], t_max, grid_step, table, quad, primes)?[0])
}

/// Mean-square errors for several cutoffs, sharing the η̃ evaluations.
#[allow(clippy::too_many_arguments)]
pub fn mean_square_sweep(
    m: u32,
    sigma: f64,
    xs: &[f64],
    t_max: f64,
    grid_step: f64,
    table: &ZeroTable,
    quad: &QuadSpec,
    primes: &PrimeTable,
) -> Result<Vec<MeanSquareReport>> {
    if !(t_max > MEAN_SQUARE_START) || !t_max.is_finite() {
        return Err(Error::invalid(format!("T must exceed the lower limit {MEAN_SQUARE_START}, got {t_max}")));
    }
    if !(grid_step > 0.0 && grid_step <= 0.25) {
        return Err(Error::invalid(format!("grid_step must be in (0, 0.25], got {grid_step}")));
    }
    for &x in xs {
        check_args(sigma, 0.0, x, primes)?;
        if !(x >= 2.0) {
            return Err(Error::invalid(format!("cutoff X must be at least 2, got {x}")));
        }
    }
    if sigma < 1.0 && t_max > table.coverage() {
        return Err(Error::TableCoverage { t: t_max, coverage: table.coverage() });
    }
    let intervals = ((t_max - MEAN_SQUARE_START) / grid_step).ceil() as usize;
    let h = (t_max - MEAN_SQUARE_START) / intervals as f64;
    let grid: Vec<f64> = (0..=intervals).map(|j| MEAN_SQUARE_START + j as f64 * h).collect();

    let etas: Vec<Option<Complex64>> = grid
        .par_iter()
        .map(|&t| {
            if check_guard(sigma, t, table).is_err() {
                return Ok(None);
            }
            match eta_tilde_weighted(m, sigma, t, table, quad) {
                Ok(v) => Ok(Some(v.value)),
                Err(Error::BranchObstruction { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let total = grid.len();
    let skipped = etas.iter().filter(|e| e.is_none()).count();
    if 5 * skipped > total {
        return Err(Error::TooFewSamples { skipped, total });
    }

    xs.iter()
        .map(|&x| {
            let samples: Vec<(f64, f64)> = grid
                .par_iter()
                .zip(&etas)
                .filter_map(|(&t, e)| e.map(|e| (t, e)))
                .map(|(t, e)| Ok((t, (e - dirichlet_li_sum(m, sigma, t, x, primes)?).norm_sqr())))
                .collect::<Result<_>>()?;
            let integral: f64 = samples.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0)).sum();
            let mse = integral / t_max;
            let shape = x.powf(1.0 - 2.0 * sigma) / x.ln().powi(2 * m as i32);
            Ok(MeanSquareReport { m, sigma, x, t_max, grid_step: h, mse, bound_ratio: mse / shape, skipped, total })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polylog::polylog;
    use crate::primes::sieve_primes;

    #[test]
    fn single_prime_sum() {
        let primes = sieve_primes(100).unwrap();
        let v = dirichlet_li_sum(1, 2.0, 0.0, 2.0, &primes).unwrap();
        let want = polylog(2, Complex64::new(0.25, 0.0)).unwrap() / 2f64.ln();
        assert!((v - want).norm() < 1e-15);
        assert_eq!(dirichlet_li_sum(1, 2.0, 0.0, 1.5, &primes).unwrap(), Complex64::new(0.0, 0.0));
        assert!(matches!(dirichlet_li_sum(1, 2.0, 0.0, 200.0, &primes), Err(Error::CutoffExceeded { .. })));
    }

    #[test]
    fn mangoldt_hand_values() {
        let v = mangoldt_sum(1, 2.0, 0.0, 3.0);
        let want = 1.0 / (4.0 * 2f64.ln()) + 1.0 / (9.0 * 3f64.ln());
        assert!((v.re - want).abs() < 1e-15 && v.im == 0.0);
        assert_eq!(mangoldt_sum(1, 2.0, 0.0, 1.5), Complex64::new(0.0, 0.0));
        // n = 2, 3, 4, 5, 7, 8 with Λ(4) = Λ(8) = log 2
        let brute: f64 = [(2.0, 2.0), (3.0, 3.0), (4.0, 2.0), (5.0, 5.0), (7.0, 7.0), (8.0, 2.0)]
            .iter()
            .map(|&(n, p): &(f64, f64)| p.ln() / (n * n * n.ln().powi(2)))
            .sum();
        assert!((mangoldt_sum(1, 2.0, 0.0, 8.0).re - brute).abs() < 1e-15);
    }

    #[test]
    fn gap_single_prime() {
        let primes = sieve_primes(100).unwrap();
        let (m, sigma, t) = (1, 0.7, 3.0);
        let v = li_vs_mangoldt_gap(m, sigma, t, 2.0, &primes).unwrap();
        let l2 = 2f64.ln();
        let want: Complex64 = (2..200)
            .map(|k| {
                let k = k as f64;
                Complex64::from_polar(2f64.powf(-k * sigma), -k * t * l2) / (k * k * l2)
            })
            .sum();
        assert!((v - want).norm() < 1e-14);
    }

    #[test]
    fn gap_is_small_far_right() {
        let primes = sieve_primes(1000).unwrap();
        assert!(li_vs_mangoldt_gap(1, 2.0, 7.0, 100.0, &primes).unwrap().norm() < 1e-4);
    }

    #[test]
    fn decomposition_holds() {
        let primes = sieve_primes(1000).unwrap();
        let li = dirichlet_li_sum(1, 0.5, 30.0, 100.0, &primes).unwrap();
        let rest = mangoldt_sum(1, 0.5, 30.0, 100.0) + li_vs_mangoldt_gap(1, 0.5, 30.0, 100.0, &primes).unwrap();
        assert!((li - rest).norm() < 1e-12);
    }

    #[test]
    fn real_on_the_axis() {
        let primes = sieve_primes(1000).unwrap();
        assert_eq!(dirichlet_li_sum(2, 0.8, 0.0, 500.0, &primes).unwrap().im, 0.0);
    }

    #[test]
    fn mean_square_far_right_is_small() {
        let primes = sieve_primes(1000).unwrap();
        let r =
            mean_square_error(1, 2.0, 50.0, 100.0, 0.25, &ZeroTable::bundled(), &QuadSpec::default(), &primes).unwrap();
        assert!(r.mse < 1e-4, "{r:?}");
        assert_eq!(r.skipped, 0);
    }

    #[test]
    fn mean_square_preconditions() {
        let primes = sieve_primes(1000).unwrap();
        let (table, quad) = (ZeroTable::bundled(), QuadSpec::default());
        assert!(mean_square_error(1, 2.0, 50.0, 10.0, 0.25, &table, &quad, &primes).is_err());
        assert!(mean_square_error(1, 2.0, 50.0, 100.0, 0.5, &table, &quad, &primes).is_err());
        assert!(mean_square_error(1, 0.4, 50.0, 100.0, 0.25, &table, &quad, &primes).is_err());
        assert!(matches!(
            mean_square_error(1, 0.8, 50.0, 1000.0, 0.25, &table, &quad, &primes),
            Err(Error::TableCoverage { .. })
        ));
    }
}
