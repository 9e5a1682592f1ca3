//! Sieve of Eratosthenes over odd numbers.

use crate::error::{Error, Result};

pub const MIN_LIMIT: u64 = 3;
pub const MAX_LIMIT: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
    logs: Vec<f64>,
}

pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    if !(MIN_LIMIT..=MAX_LIMIT).contains(&limit) {
        return Err(Error::LimitExceeded { limit, min: MIN_LIMIT, max: MAX_LIMIT });
    }
    // composite[i] refers to the odd number 2i + 1
    let half = limit.div_ceil(2) as usize;
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = (p * p) / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(estimate_count(limit));
    primes.push(2);
    primes.extend(composite.iter().enumerate().filter(|(_, &c)| !c).map(|(i, _)| 2 * i as u64 + 1));
    let logs = primes.iter().map(|&p| (p as f64).ln()).collect();
    Ok(PrimeTable { limit, primes, logs })
}

fn estimate_count(limit: u64) -> usize {
    let x = limit as f64;
    (1.3 * x / x.ln().max(1.0)) as usize + 16
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Number of primes `≤ x`.
    pub fn count_up_to(&self, x: f64) -> usize {
        if x < 2.0 {
            return 0;
        }
        let bound = x.floor() as u64;
        self.primes.partition_point(|&p| p <= bound)
    }
}
