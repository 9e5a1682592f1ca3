//! Riemann zeta by Euler–Maclaurin summation, and log ζ on horizontal rays.
//!
//! The logarithm is the branch obtained by continuing from `+∞` leftward along
//! the ray `α + it`. To the right of `BRANCH_ANCHOR` the principal logarithm is
//! that branch (there `|ζ - 1| < 1`). To the left, table zeros near the ray and
//! the pole are divided out,
//!
//! ```text
//! h(s) = (s - 1) ζ(s) / Π (s - ρ)^mult,
//! ```
//!
//! the argument of `h` is tracked numerically, and the removed factors are put
//! back as principal logarithms. That keeps the tracked function away from the
//! zeros and lets callers integrate the logarithmic factors in closed form.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zeros::ZeroTable;

pub const MAX_HEIGHT: f64 = 1e4;

/// Distance in `t` from a zero ordinate inside which rays are refused.
pub const GUARD_DISTANCE: f64 = 1e-3;

/// Principal log ζ is the continued branch for `α ≥ BRANCH_ANCHOR`.
pub(crate) const BRANCH_ANCHOR: f64 = 2.0;

/// Zeros with `| |t| - γ | ≤ DEFLATION_RADIUS` are divided out along a ray.
pub(crate) const DEFLATION_RADIUS: f64 = 1.0;

const MAX_EM_TERMS: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub sigma: f64,
    pub t: f64,
}

impl ComplexPoint {
    pub fn new(sigma: f64, t: f64) -> Result<Self> {
        if !sigma.is_finite() || !t.is_finite() {
            return Err(Error::invalid(format!("non-finite point sigma = {sigma}, t = {t}")));
        }
        Ok(ComplexPoint { sigma, t })
    }

    pub fn s(&self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalParams {
    /// Minimum Euler–Maclaurin cutoff; the actual cutoff also scales with `|t|`.
    pub em_terms: usize,
    pub em_bernoulli: usize,
    pub tol: f64,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams { em_terms: 50, em_bernoulli: 8, tol: 1e-12 }
    }
}

impl EvalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.em_terms < 10 {
            return Err(Error::invalid(format!("em_terms must be at least 10, got {}", self.em_terms)));
        }
        if self.em_bernoulli == 0 || self.em_bernoulli >= BERNOULLI.len() {
            return Err(Error::invalid(format!(
                "em_bernoulli must be in 1..={}, got {}",
                BERNOULLI.len() - 1,
                self.em_bernoulli
            )));
        }
        Ok(())
    }
}

// B_2, B_4, ..., B_26
const BERNOULLI: [f64; 13] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
];

fn bernoulli_over_factorial() -> &'static [f64; 13] {
    static TABLE: OnceLock<[f64; 13]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; 13];
        let mut fact = 1.0;
        for (k, b) in BERNOULLI.iter().enumerate() {
            let n = 2 * (k + 1);
            fact *= ((n - 1) * n) as f64;
            out[k] = b / fact;
        }
        out
    })
}

fn ln_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| (0..1usize << 16).map(|n| if n == 0 { 0.0 } else { (n as f64).ln() }).collect())
}

#[inline]
fn ln_n(n: usize) -> f64 {
    ln_table().get(n).copied().unwrap_or_else(|| (n as f64).ln())
}

/// `n^{-s}` for `s = sigma + i t`.
#[inline]
fn n_pow_neg(n: usize, s: Complex64) -> Complex64 {
    let l = ln_n(n);
    let (sin, cos) = (s.im * l).sin_cos();
    Complex64::new(cos, -sin) * (-s.re * l).exp()
}

/// Pieces of the Euler–Maclaurin formula: `zeta = head + pole_part / (s - 1)`.
struct EmParts {
    head: Complex64,
    pole_part: Complex64,
}

fn em_parts(s: Complex64, params: &EvalParams) -> EmParts {
    let coeffs = bernoulli_over_factorial();
    let k_max = params.em_bernoulli.min(coeffs.len() - 1);
    let mut n = params.em_terms.max((3.0 * s.im.abs()).ceil() as usize);
    loop {
        let nf = n as f64;
        let n_s = n_pow_neg(n, s);
        let inv_n2 = 1.0 / (nf * nf);
        let mut poch = s;
        let mut power = n_s / nf;
        let mut corr = Complex64::new(0.0, 0.0);
        for (k, c) in coeffs.iter().enumerate().take(k_max) {
            corr += poch * power * *c;
            let kk = (2 * (k + 1)) as f64;
            poch *= (s + (kk - 1.0)) * (s + kk);
            power *= inv_n2;
        }
        let next = (poch * power * coeffs[k_max]).norm();
        let bound = next * (s + (2 * k_max + 1) as f64).norm() / (s.re + (2 * k_max + 1) as f64);
        if bound > 0.5 * params.tol && n < MAX_EM_TERMS {
            n *= 2;
            continue;
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for j in (1..n).rev() {
            sum += n_pow_neg(j, s);
        }
        return EmParts { head: sum + n_s * 0.5 + corr, pole_part: n_s * nf };
    }
}

/// ζ(s) without range checks; `s` must not be 1.
pub(crate) fn zeta_raw(s: Complex64, params: &EvalParams) -> Complex64 {
    let p = em_parts(s, params);
    p.head + p.pole_part / (s - 1.0)
}

/// `(s - 1) ζ(s)`, an entire function.
pub(crate) fn zeta_times_s_minus_one(s: Complex64, params: &EvalParams) -> Complex64 {
    let p = em_parts(s, params);
    p.head * (s - 1.0) + p.pole_part
}

fn check_range(sigma: f64, t: f64) -> Result<()> {
    if !sigma.is_finite() || !t.is_finite() {
        return Err(Error::invalid(format!("non-finite point sigma = {sigma}, t = {t}")));
    }
    if sigma < 0.0 {
        return Err(Error::UnsupportedRange { sigma, t, detail: "sigma must be non-negative".into() });
    }
    if t.abs() > MAX_HEIGHT {
        return Err(Error::UnsupportedRange { sigma, t, detail: format!("|t| must not exceed {MAX_HEIGHT}") });
    }
    Ok(())
}

pub fn zeta(s: ComplexPoint, params: &EvalParams) -> Result<Complex64> {
    params.validate()?;
    check_range(s.sigma, s.t)?;
    if s.sigma == 1.0 && s.t == 0.0 {
        return Err(Error::PoleAt1);
    }
    let z = zeta_raw(s.s(), params);
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::EvalFailure(format!("non-finite zeta at {}+{}i", s.sigma, s.t)));
    }
    Ok(z)
}

/// Rejects rays passing within the guard distance of a table zero they reach.
pub(crate) fn check_guard(sigma: f64, t: f64, table: &ZeroTable) -> Result<()> {
    if let Some(z) = table
        .near(t.abs(), GUARD_DISTANCE)
        .iter()
        .find(|z| sigma <= z.beta && (t.abs() - z.gamma).abs() < GUARD_DISTANCE)
    {
        return Err(Error::BranchObstruction {
            sigma,
            t,
            detail: format!("ray passes within {GUARD_DISTANCE} of the zero {}+{}i", z.beta, z.gamma),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug)]
struct Node {
    alpha: f64,
    h: Complex64,
    arg: f64,
}

/// A logarithmic factor `order · Log(s - center)` split off log ζ along a ray.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct LogFactor {
    pub center: Complex64,
    pub order: f64,
}

/// Branch-tracked log ζ along one horizontal ray, reusable for many abscissae.
#[derive(Clone, Debug)]
pub(crate) struct LogZetaRay {
    t: f64,
    params: EvalParams,
    factors: Vec<LogFactor>,
    nodes: Vec<Node>,
}

const MAX_ARG_STEP: f64 = 0.35;
const MAX_ALPHA_STEP: f64 = 0.5;
const MIN_ALPHA_STEP: f64 = 1e-12;

impl LogZetaRay {
    /// Tracks the branch from the anchor down to `alpha_min`.
    pub(crate) fn new(t: f64, alpha_min: f64, table: &ZeroTable, params: &EvalParams) -> Result<Self> {
        // t = 0 is read as the limit from above.
        let t = if t == 0.0 { 0.0 } else { t };
        let mut factors = vec![LogFactor { center: Complex64::new(1.0, 0.0), order: -1.0 }];
        let sign = if t < 0.0 { -1.0 } else { 1.0 };
        for z in table.near(t.abs(), DEFLATION_RADIUS) {
            factors.push(LogFactor { center: Complex64::new(z.beta, sign * z.gamma), order: z.multiplicity as f64 });
        }
        let mut ray = LogZetaRay { t, params: *params, factors, nodes: Vec::new() };
        ray.track(alpha_min)?;
        Ok(ray)
    }

    pub(crate) fn t(&self) -> f64 {
        self.t
    }

    pub(crate) fn factors(&self) -> &[LogFactor] {
        &self.factors
    }

    fn factor_logs(&self, alpha: f64) -> Complex64 {
        self.factors.iter().map(|f| Complex64::new(alpha - f.center.re, self.t - f.center.im).ln() * f.order).sum()
    }

    fn h(&self, alpha: f64) -> Result<Complex64> {
        let s = Complex64::new(alpha, self.t);
        let mut h = zeta_times_s_minus_one(s, &self.params);
        for f in self.factors.iter().skip(1) {
            h /= (s - f.center).powf(f.order);
        }
        if !(h.re.is_finite() && h.im.is_finite()) || h.norm() == 0.0 {
            return Err(Error::BranchObstruction {
                sigma: alpha,
                t: self.t,
                detail: "deflated zeta vanished or overflowed".into(),
            });
        }
        Ok(h)
    }

    fn track(&mut self, alpha_min: f64) -> Result<()> {
        let mut a = BRANCH_ANCHOR;
        let mut h_a = self.h(a)?;
        let mut arg_a = self.log_h_anchored(a)?.im;
        self.nodes.push(Node { alpha: a, h: h_a, arg: arg_a });
        let mut step: f64 = 0.1;
        while a > alpha_min {
            let b = (a - step).max(alpha_min);
            let mid = 0.5 * (a + b);
            let h_mid = self.h(mid)?;
            let h_b = self.h(b)?;
            let d1 = (h_mid / h_a).arg();
            let d2 = (h_b / h_mid).arg();
            let d = (h_b / h_a).arg();
            if d1.abs() <= MAX_ARG_STEP && d2.abs() <= MAX_ARG_STEP && (d1 + d2 - d).abs() < 1e-8 {
                self.nodes.push(Node { alpha: mid, h: h_mid, arg: arg_a + d1 });
                arg_a += d1 + d2;
                self.nodes.push(Node { alpha: b, h: h_b, arg: arg_a });
                a = b;
                h_a = h_b;
                step = (step * 1.5).min(MAX_ALPHA_STEP);
            } else {
                step *= 0.5;
                if step < MIN_ALPHA_STEP {
                    return Err(Error::BranchObstruction {
                        sigma: a,
                        t: self.t,
                        detail: "argument of zeta varies too fast to track".into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// log h from the principal log of ζ, valid right of the anchor.
    fn log_h_anchored(&self, alpha: f64) -> Result<Complex64> {
        let z = zeta_raw(Complex64::new(alpha, self.t), &self.params);
        Ok(z.ln() - self.factor_logs(alpha))
    }

    /// The continued logarithm of the deflated function.
    pub(crate) fn log_h(&self, alpha: f64) -> Result<Complex64> {
        if alpha >= BRANCH_ANCHOR {
            return self.log_h_anchored(alpha);
        }
        let nodes = &self.nodes;
        let idx = nodes.partition_point(|n| n.alpha > alpha);
        if idx >= nodes.len() && nodes.last().is_some_and(|n| alpha < n.alpha - 1e-12) {
            return Err(Error::invalid(format!("abscissa {alpha} left of the tracked ray")));
        }
        let node = match (idx.checked_sub(1).map(|i| nodes[i]), nodes.get(idx)) {
            (Some(l), Some(r)) => {
                if (l.alpha - alpha) < (alpha - r.alpha) {
                    l
                } else {
                    *r
                }
            }
            (Some(l), None) => l,
            (None, Some(r)) => *r,
            (None, None) => unreachable!("ray has at least the anchor node"),
        };
        let h = self.h(alpha)?;
        Ok(Complex64::new(h.norm().ln(), node.arg + (h / node.h).arg()))
    }

    pub(crate) fn log_zeta(&self, alpha: f64) -> Result<Complex64> {
        if alpha >= BRANCH_ANCHOR {
            return Ok(zeta_raw(Complex64::new(alpha, self.t), &self.params).ln());
        }
        Ok(self.log_h(alpha)? + self.factor_logs(alpha))
    }
}

/// Branch of log ζ(σ + it) continued from `+∞` along the horizontal ray.
///
/// At `t = 0` and `σ < 1` the ray runs through the pole; the value is the limit
/// from the upper half plane, so `Im log ζ(σ) = -π` there.
pub fn log_zeta_horizontal(sigma: f64, t: f64, table: &ZeroTable, params: &EvalParams) -> Result<Complex64> {
    params.validate()?;
    check_range(sigma, t)?;
    if sigma == 1.0 && t == 0.0 {
        return Err(Error::PoleAt1);
    }
    check_guard(sigma, t, table)?;
    LogZetaRay::new(t, sigma, table, params)?.log_zeta(sigma)
}
