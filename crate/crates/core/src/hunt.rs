//! Searching for heights `t` where η̃_m(σ+it) is close to a prescribed value.
//!
//! The fractional parts `{t log p / 2π}` of the first few primes are steered
//! to a torus target by a grid search (Kronecker approximation). Because the
//! first few coordinates alone do not pin down η̃, the hunt also screens the
//! grid with a short Dirichlet polynomial and refines the best candidates with
//! the full quadrature.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dirichlet::dirichlet_li_sum;
use crate::error::{Error, Result};
use crate::eta::{eta_tilde_weighted, QuadSpec};
use crate::primes::{sieve_primes, PrimeTable};
use crate::torus::construct_theta;
use crate::zeros::ZeroTable;

pub const MAX_GRID_POINTS: u64 = 1_000_000_000;
const CHUNK: u64 = 1 << 18;
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusTarget {
    pub primes: Vec<u64>,
    pub thetas: Vec<f64>,
    pub delta: f64,
}

impl TorusTarget {
    pub fn new(primes: Vec<u64>, thetas: Vec<f64>, delta: f64) -> Result<Self> {
        if primes.is_empty() || primes.len() != thetas.len() {
            return Err(Error::invalid(format!("{} primes for {} coordinates", primes.len(), thetas.len())));
        }
        if primes.iter().any(|&p| p < 2) {
            return Err(Error::invalid("torus coordinates must be indexed by primes"));
        }
        if let Some(th) = thetas.iter().find(|th| !(0.0..1.0).contains(*th)) {
            return Err(Error::invalid(format!("coordinate {th} outside [0, 1)")));
        }
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::invalid(format!("delta must be in (0, 1/2), got {delta}")));
        }
        Ok(TorusTarget { primes, thetas, delta })
    }

    fn frequencies(&self) -> Vec<f64> {
        self.primes.iter().map(|&p| (p as f64).ln() / TWO_PI).collect()
    }

    /// Largest circular distance between `{t log p / 2π}` and the target.
    pub fn distance(&self, t: f64) -> f64 {
        self.frequencies()
            .iter()
            .zip(&self.thetas)
            .map(|(f, &th)| circular_distance((t * f).fract(), th))
            .fold(0.0, f64::max)
    }
}

/// Distance on the circle `R/Z`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn grid_len(t_min: f64, t_max: f64, step: f64) -> Result<u64> {
    let n = ((t_max - t_min) / step + 1e-9).floor() + 1.0;
    if n > MAX_GRID_POINTS as f64 {
        return Err(Error::BudgetExceeded { requested: n as u64, allowed: MAX_GRID_POINTS });
    }
    Ok(n as u64)
}

/// Grid points `t_min + k·step ≤ t_max` whose torus coordinates are within
/// `delta` of the target in every coordinate, ascending.
pub fn kronecker_search(target: &TorusTarget, t_min: f64, t_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(t_min >= 0.0) || !t_max.is_finite() || t_max < t_min {
        return Err(Error::invalid(format!("need 0 <= t_min <= t_max, got [{t_min}, {t_max}]")));
    }
    let fastest = target.primes.iter().map(|&p| (p as f64).ln()).fold(0.0, f64::max);
    if !(step > 0.0) || step > target.delta / fastest {
        return Err(Error::invalid(format!(
            "step {step} must be positive and at most delta / log p_N = {}",
            target.delta / fastest
        )));
    }
    let n = grid_len(t_min, t_max, step)?;
    let freqs = target.frequencies();
    let chunks: Vec<Vec<f64>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut hits = Vec::new();
            for k in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let t = t_min + k as f64 * step;
                if freqs
                    .iter()
                    .zip(&target.thetas)
                    .all(|(f, &th)| circular_distance((t * f).fract(), th) <= target.delta)
                {
                    hits.push(t);
                }
            }
            hits
        })
        .collect();
    Ok(chunks.concat())
}

/// Fraction of a fine grid on `[0, T]` whose torus point lies in the box,
/// and the box volume.
pub fn equidistribution_measure(boxes: &[(f64, f64)], t_max: f64, primes: &[u64]) -> Result<(f64, f64)> {
    if !(t_max >= 1e3) || !t_max.is_finite() {
        return Err(Error::invalid(format!("T must be at least 1000, got {t_max}")));
    }
    if primes.is_empty() || primes.len() > 4 || boxes.len() != primes.len() {
        return Err(Error::invalid(format!(
            "need 1 to 4 primes with one interval each, got {} and {}",
            primes.len(),
            boxes.len()
        )));
    }
    if let Some(b) = boxes.iter().find(|(lo, hi)| !(0.0 <= *lo && lo < hi && *hi <= 1.0)) {
        return Err(Error::invalid(format!("interval {b:?} is not inside [0, 1]")));
    }
    let freqs: Vec<f64> = primes.iter().map(|&p| (p as f64).ln() / TWO_PI).collect();
    let fastest = freqs.iter().cloned().fold(0.0, f64::max);
    // the fastest coordinate advances at most 1/200 of a turn per step
    let n = (t_max * fastest * 200.0).ceil() as u64;
    let h = t_max / n as f64;
    let inside: u64 = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            (c * CHUNK..((c + 1) * CHUNK).min(n))
                .filter(|&k| {
                    let t = (k as f64 + 0.5) * h;
                    freqs.iter().zip(boxes).all(|(f, (lo, hi))| {
                        let x = (t * f).fract();
                        *lo <= x && x < *hi
                    })
                })
                .count() as u64
        })
        .sum();
    let expected = boxes.iter().map(|(lo, hi)| hi - lo).product();
    Ok((inside as f64 / n as f64, expected))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HuntConfig {
    pub t_min: f64,
    pub t_max: f64,
    /// Box half-width on the searched torus coordinates.
    pub delta: f64,
    /// Number of leading primes steered by the grid search.
    pub n_search: usize,
    /// Grid step; `None` means `delta / log p_N`.
    pub step: Option<f64>,
    /// Cutoff `X` of the screening polynomial.
    pub proxy_cutoff: f64,
    pub proxy_step: f64,
    /// Screening keeps local minima of `|D_X(t) - a|` below this radius.
    pub screen_radius: f64,
    /// Candidates are refined over `±refine_halfwidth` when their first
    /// evaluation is within `screen_radius` of the target.
    pub refine_halfwidth: f64,
    pub refine_iterations: usize,
    /// Maximum number of η̃ evaluations; candidates beyond it are dropped in
    /// screening order and the hunt reports what it found.
    pub max_evaluations: usize,
    pub sieve_limit: u64,
    pub quad: QuadSpec,
}

impl Default for HuntConfig {
    fn default() -> Self {
        HuntConfig {
            t_min: 10.0,
            t_max: 100.0,
            delta: 0.1,
            n_search: 5,
            step: None,
            proxy_cutoff: 1000.0,
            proxy_step: 0.01,
            screen_radius: 0.5,
            refine_halfwidth: 0.25,
            refine_iterations: 30,
            max_evaluations: 20_000,
            sieve_limit: 1_000_000,
            quad: QuadSpec::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HuntStatus {
    Success,
    HonestFailure,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HuntDiagnostics {
    pub search_primes: Vec<u64>,
    pub torus_target: Vec<f64>,
    pub step: f64,
    /// Window parameters of the constructed torus point, when it succeeded.
    pub pipeline_u: Option<u64>,
    pub pipeline_n: Option<u64>,
    pub pipeline_error: Option<f64>,
    pub pipeline_failure: Option<String>,
    /// Part of the constructed sum carried by primes beyond the searched ones.
    pub unsearched_window: Option<f64>,
    pub box_hits: usize,
    pub proxy_candidates: usize,
    pub refined: usize,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HuntResult {
    pub t_witness: f64,
    /// Largest circular distance of the witness from the torus target.
    pub torus_error: f64,
    pub in_box: bool,
    pub eta_value: Complex64,
    pub target_a: Complex64,
    pub final_error: f64,
    /// Number of η̃ evaluations.
    pub budget_used: usize,
    pub status: HuntStatus,
    pub diagnostics: HuntDiagnostics,
}

struct Evaluator<'a> {
    m: u32,
    sigma: f64,
    a: Complex64,
    table: &'a ZeroTable,
    quad: &'a QuadSpec,
}

impl Evaluator<'_> {
    /// `(|η̃ - a|, η̃)`, or `None` inside a guard zone.
    fn eval(&self, t: f64) -> Result<Option<(f64, Complex64)>> {
        match eta_tilde_weighted(self.m, self.sigma, t, self.table, self.quad) {
            Ok(v) => Ok(Some(((v.value - self.a).norm(), v.value))),
            Err(Error::BranchObstruction { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Golden-section search around `center`; returns the best point seen and
    /// the number of evaluations.
    fn refine(
        &self,
        center: f64,
        start: (f64, Complex64),
        half: f64,
        iters: usize,
    ) -> Result<((f64, f64, Complex64), usize)> {
        let mut best = (center, start.0, start.1);
        let mut evals = 0;
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut lo, mut hi) = ((center - half).max(0.0), center + half);
        let probe = |t: f64, best: &mut (f64, f64, Complex64), evals: &mut usize| -> Result<f64> {
            *evals += 1;
            Ok(match self.eval(t)? {
                Some((e, v)) => {
                    if e < best.1 {
                        *best = (t, e, v);
                    }
                    e
                }
                None => f64::INFINITY,
            })
        };
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let mut f1 = probe(x1, &mut best, &mut evals)?;
        let mut f2 = probe(x2, &mut best, &mut evals)?;
        for _ in 0..iters {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = probe(x1, &mut best, &mut evals)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = probe(x2, &mut best, &mut evals)?;
            }
        }
        Ok((best, evals))
    }
}

/// Local minima of `|D_X(t) - a|` on the screening grid below the radius.
fn proxy_minima(m: u32, sigma: f64, a: Complex64, config: &HuntConfig, primes: &PrimeTable) -> Result<(Vec<f64>, f64)> {
    let n = grid_len(config.t_min, config.t_max, config.proxy_step)?;
    let dist: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let t = config.t_min + k as f64 * config.proxy_step;
            Ok((dirichlet_li_sum(m, sigma, t, config.proxy_cutoff, primes)? - a).norm())
        })
        .collect::<Result<_>>()?;
    let mut minima = Vec::new();
    for k in 1..dist.len().saturating_sub(1) {
        if dist[k] < config.screen_radius && dist[k] <= dist[k - 1] && dist[k] < dist[k + 1] {
            minima.push(config.t_min + k as f64 * config.proxy_step);
        }
    }
    let best = (0..dist.len())
        .min_by(|&i, &j| dist[i].total_cmp(&dist[j]))
        .map_or(config.t_min, |k| config.t_min + k as f64 * config.proxy_step);
    Ok((minima, best))
}

/// Finds `t` with `|η̃_m(σ+it) - a| < ε`, or reports the best attempt.
pub fn hunt_value(
    m: u32,
    sigma: f64,
    a: Complex64,
    epsilon: f64,
    config: &HuntConfig,
    table: &ZeroTable,
) -> Result<HuntResult> {
    if !(0.5..1.0).contains(&sigma) {
        return Err(Error::invalid(format!("sigma must be in [1/2, 1), got {sigma}")));
    }
    if !(epsilon > 0.0) || !a.re.is_finite() || !a.im.is_finite() {
        return Err(Error::invalid("epsilon must be positive and the target finite"));
    }
    if config.n_search == 0 || !(config.t_min >= 0.0) || !(config.t_max > config.t_min) {
        return Err(Error::invalid("hunt needs n_search >= 1 and 0 <= t_min < t_max"));
    }
    if config.max_evaluations == 0 {
        return Err(Error::invalid("max_evaluations must be at least 1"));
    }
    if !(config.proxy_step > 0.0 && config.refine_halfwidth >= 0.0 && config.screen_radius > 0.0) {
        return Err(Error::invalid("proxy_step and screen_radius must be positive, refine_halfwidth non-negative"));
    }
    let reach = config.t_max + config.refine_halfwidth;
    if reach > table.coverage() {
        return Err(Error::TableCoverage { t: reach, coverage: table.coverage() });
    }
    let primes = sieve_primes(config.sieve_limit)?;
    if primes.len() < config.n_search || config.proxy_cutoff > primes.limit() as f64 {
        return Err(Error::invalid("sieve limit too small for n_search or the screening cutoff"));
    }

    let mut diag = HuntDiagnostics::default();
    let search_primes = primes.primes()[..config.n_search].to_vec();
    let base: Vec<f64> = (0..config.n_search).map(|i| if i % 2 == 0 { 0.0 } else { 0.5 }).collect();
    let thetas = match construct_theta(m, sigma, a, epsilon / 3.0, &primes) {
        Ok(p) => {
            let first: std::collections::BTreeMap<u64, f64> =
                search_primes.iter().copied().zip(p.theta2.thetas.iter().copied()).collect();
            let head = crate::torus::s_sum(&first, sigma, m)?;
            diag.pipeline_u = Some(p.u);
            diag.pipeline_n = Some(p.n);
            diag.pipeline_error = Some(p.final_error);
            diag.unsearched_window = Some((p.final_sum - head).norm());
            p.theta2.thetas[..config.n_search].to_vec()
        }
        Err(e) => {
            diag.pipeline_failure = Some(e.to_string());
            base
        }
    };
    let target = TorusTarget::new(search_primes.clone(), thetas, config.delta)?;
    let fastest = (*search_primes.last().unwrap() as f64).ln();
    let step = config.step.unwrap_or(config.delta / fastest);
    let hits = kronecker_search(&target, config.t_min, config.t_max, step)?;
    let (proxies, best_proxy) = proxy_minima(m, sigma, a, config, &primes)?;
    diag.search_primes = search_primes;
    diag.torus_target = target.thetas.clone();
    diag.step = step;
    diag.box_hits = hits.len();
    diag.proxy_candidates = proxies.len();

    let mut candidates: Vec<f64> = hits.iter().chain(&proxies).copied().collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    if candidates.is_empty() {
        candidates.push(best_proxy);
        diag.note = "no box hit or screened candidate; evaluated the best screening point".into();
    }
    // evaluation order: closest screening value first, then height
    let mut screened: Vec<(f64, f64)> = candidates
        .par_iter()
        .map(|&t| Ok(((dirichlet_li_sum(m, sigma, t, config.proxy_cutoff, &primes)? - a).norm(), t)))
        .collect::<Result<_>>()?;
    screened.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let budget = config.max_evaluations;
    if screened.len() > budget {
        diag.note = format!("evaluation budget {budget} reached before all {} candidates", screened.len());
        screened.truncate(budget);
    }
    let candidates: Vec<f64> = screened.iter().map(|c| c.1).collect();

    let ev = Evaluator { m, sigma, a, table, quad: &config.quad };
    let first: Vec<Option<(f64, Complex64)>> = candidates.par_iter().map(|&t| ev.eval(t)).collect::<Result<_>>()?;
    let mut budget_used = candidates.len();

    let mut to_refine: Vec<(f64, (f64, Complex64))> = candidates
        .iter()
        .zip(&first)
        .filter_map(|(&t, f)| {
            f.filter(|(e, _)| *e < config.screen_radius && config.refine_halfwidth > 0.0).map(|f| (t, f))
        })
        .collect();
    to_refine.sort_by(|x, y| x.1 .0.total_cmp(&y.1 .0).then(x.0.total_cmp(&y.0)));
    let per_refine = config.refine_iterations + 2;
    let affordable = (budget - budget_used) / per_refine;
    if to_refine.len() > affordable {
        diag.note =
            format!("evaluation budget {budget} allowed refining {affordable} of {} candidates", to_refine.len());
        to_refine.truncate(affordable);
    }
    diag.refined = to_refine.len();
    let refined: Vec<((f64, f64, Complex64), usize)> = to_refine
        .par_iter()
        .map(|&(t, start)| ev.refine(t, start, config.refine_halfwidth, config.refine_iterations))
        .collect::<Result<_>>()?;
    budget_used += refined.iter().map(|r| r.1).sum::<usize>();

    let mut best: Option<(f64, f64, Complex64)> = None;
    let all = candidates
        .iter()
        .zip(&first)
        .filter_map(|(&t, f)| f.map(|(e, v)| (t, e, v)))
        .chain(refined.iter().map(|r| r.0));
    for c in all {
        if best.is_none_or(|b| c.1 < b.1 || (c.1 == b.1 && c.0 < b.0)) {
            best = Some(c);
        }
    }
    let Some((t_witness, final_error, eta_value)) = best else {
        return Err(Error::EvalFailure("every candidate height fell in a guard zone".into()));
    };
    let torus_error = target.distance(t_witness);
    Ok(HuntResult {
        t_witness,
        torus_error,
        in_box: torus_error <= config.delta,
        eta_value,
        target_a: a,
        final_error,
        budget_used,
        status: if final_error < epsilon { HuntStatus::Success } else { HuntStatus::HonestFailure },
        diagnostics: diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_frequency_hits() {
        let target = TorusTarget::new(vec![2], vec![0.5], 1e-3).unwrap();
        let step = 1e-3 / 2f64.ln();
        let hits = kronecker_search(&target, 0.0, 10.0, step).unwrap();
        let want = std::f64::consts::PI / 2f64.ln();
        assert!((hits[0] - want).abs() < 0.01, "{:?}", &hits[..3]);
    }

    #[test]
    fn periodic_hits() {
        let target = TorusTarget::new(vec![2], vec![0.0], 1e-3).unwrap();
        let step = 1e-3 / 2f64.ln();
        let hits = kronecker_search(&target, 0.1, 30.0, step).unwrap();
        let period = TWO_PI / 2f64.ln();
        assert!((hits[0] - period).abs() < 0.01);
        let after: Vec<f64> = hits.iter().copied().filter(|&t| t > period + 1.0).collect();
        assert!((after[0] - 2.0 * period).abs() < 0.01);
    }

    #[test]
    fn search_preconditions() {
        let target = TorusTarget::new(vec![2, 3], vec![0.1, 0.2], 0.05).unwrap();
        assert!(kronecker_search(&target, 0.0, 10.0, 1.0).is_err());
        assert!(kronecker_search(&target, -1.0, 10.0, 0.01).is_err());
        assert!(matches!(kronecker_search(&target, 0.0, 1e9, 0.04), Err(Error::BudgetExceeded { .. })));
        assert!(TorusTarget::new(vec![2], vec![1.0], 0.1).is_err());
        assert!(TorusTarget::new(vec![2], vec![0.5], 0.5).is_err());
    }

    #[test]
    fn full_torus_measure() {
        let (m, e) = equidistribution_measure(&[(0.0, 1.0), (0.0, 1.0)], 1e3, &[2, 3]).unwrap();
        assert_eq!((m, e), (1.0, 1.0));
    }

    #[test]
    fn half_circle_measure() {
        let (m, e) = equidistribution_measure(&[(0.0, 0.5)], 1e4, &[2]).unwrap();
        assert_eq!(e, 0.5);
        assert!((0.45..=0.55).contains(&m));
    }

    #[test]
    fn circular_metric_wraps() {
        assert!((circular_distance(0.99, 0.01) - 0.02).abs() < 1e-15);
        assert!((circular_distance(0.2, 0.7) - 0.5).abs() < 1e-15);
    }
}
