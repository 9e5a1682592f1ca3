//! Iterated integrals of log ζ along horizontal and vertical lines.
//!
//! * `eta_tilde_*`: `η̃_m(σ+it) = 1/(m-1)! ∫_σ^∞ (α-σ)^{m-1} log ζ(α+it) dα`,
//!   equivalently the m-fold iterated integral from the right.
//! * `eta_vertical`: `η_m(σ+it) = ∫_0^t η_{m-1}(σ+it') dt' + c_m(σ)` with
//!   `η_0 = log ζ`, evaluated in the Cauchy-reduced form
//!   `∫_0^t (t-t')^{m-1}/(m-1)! log ζ(σ+it') dt' + Σ_j c_j(σ) t^{m-j}/(m-j)!`.
//! * `y_m`: the correction from zeros right of the line, so that
//!   `η_m = i^m η̃_m + Y_m`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{gk15, integrate, poly_log_integral, scaled_binomial, Adaptive, Integral};
use crate::zeros::{zeros_in_box, ZeroRecord, ZeroTable};
use crate::zeta::{check_guard, ComplexPoint, EvalParams, LogZetaRay, BRANCH_ANCHOR, MAX_HEIGHT};

pub const MAX_ORDER: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub abs_tol: f64,
    /// Maximum bisection depth of any initial panel.
    pub max_depth: u32,
    /// Truncation point of the horizontal integrals; `None` means `σ + 40`.
    pub horiz_cutoff: Option<f64>,
    /// Half-width of the window around a zero ordinate where the logarithmic
    /// factor is integrated in closed form on vertical paths.
    pub singularity_pad: f64,
    pub eval: EvalParams,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            abs_tol: 1e-10,
            max_depth: 40,
            horiz_cutoff: None,
            singularity_pad: 1e-2,
            eval: EvalParams::default(),
        }
    }
}

impl QuadSpec {
    pub fn cutoff(&self, sigma: f64) -> f64 {
        self.horiz_cutoff.unwrap_or(sigma + 40.0)
    }

    pub fn validate(&self, sigma: f64) -> Result<()> {
        self.eval.validate()?;
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::invalid(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if self.max_depth == 0 {
            return Err(Error::invalid("max_depth must be positive"));
        }
        if !(self.singularity_pad > 0.0 && self.singularity_pad < 0.5) {
            return Err(Error::invalid(format!("singularity_pad must be in (0, 0.5), got {}", self.singularity_pad)));
        }
        let a = self.cutoff(sigma);
        if !(a >= sigma + 10.0) || !a.is_finite() {
            return Err(Error::invalid(format!("horiz_cutoff {a} must be at least sigma + 10 = {}", sigma + 10.0)));
        }
        Ok(())
    }

    fn adaptive(&self, tol: f64) -> Adaptive {
        Adaptive { abs_tol: tol, max_depth: self.max_depth, max_panels: 50_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaValue {
    pub m: u32,
    pub point: ComplexPoint,
    pub value: Complex64,
    pub est_error: f64,
}

/// One inner-index term of the zero sum `Y_m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroSumTerm {
    pub k: u32,
    pub contribution: Complex64,
}

pub fn i_pow(m: u32) -> Complex64 {
    match m % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn check_order(m: u32) -> Result<()> {
    if m == 0 || m > MAX_ORDER {
        return Err(Error::invalid(format!("order m must be in 1..={MAX_ORDER}, got {m}")));
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma >= 0.5) || !sigma.is_finite() {
        return Err(Error::invalid(format!("sigma must be at least 1/2, got {sigma}")));
    }
    Ok(())
}

fn check_horizontal(m: u32, sigma: f64, t: f64, table: &ZeroTable, quad: &QuadSpec) -> Result<()> {
    check_order(m)?;
    check_sigma(sigma)?;
    if !t.is_finite() || t.abs() > MAX_HEIGHT {
        return Err(Error::UnsupportedRange { sigma, t, detail: format!("|t| must not exceed {MAX_HEIGHT}") });
    }
    quad.validate(sigma)?;
    check_guard(sigma, t, table)
}

// Prime powers n ≤ 64 with coefficient 1/k of n^{-s} in log ζ(s).
fn log_zeta_coefficients() -> &'static [(f64, f64)] {
    static TABLE: std::sync::OnceLock<Vec<(f64, f64)>> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::new();
        for n in 2u64..=TAIL_TERMS {
            let p = (2..=n).find(|d| n % d == 0).unwrap();
            let mut q = n;
            let mut k = 0;
            while q % p == 0 {
                q /= p;
                k += 1;
            }
            if q == 1 {
                out.push(((n as f64).ln(), 1.0 / k as f64));
            }
        }
        out
    })
}

const TAIL_TERMS: u64 = 64;

/// `1/(m-1)! ∫_A^∞ (α-σ)^{m-1} log ζ(α+it) dα` from the Dirichlet series of
/// log ζ, with a bound on the omitted terms.
fn horizontal_tail(m: u32, sigma: f64, a: f64, t: f64) -> (Complex64, f64) {
    let c = a - sigma;
    let weight =
        |ln_n: f64| -> f64 { (0..m).map(|j| c.powi(j as i32) / factorial(j) / ln_n.powi((m - j) as i32)).sum() };
    let mut value = Complex64::new(0.0, 0.0);
    for &(ln_n, coeff) in log_zeta_coefficients() {
        let phase = Complex64::new(0.0, -t * ln_n).exp();
        value += phase * (coeff * (-a * ln_n).exp() * weight(ln_n));
    }
    // Σ_{n>64} n^{-A} ≤ 65^{-A} · A/(A-1) · 65, with the weight at n = 65.
    let ln65 = (TAIL_TERMS as f64 + 1.0).ln();
    let bound = (-a * ln65).exp() * 65.0 * a / (a - 1.0) * weight(ln65);
    (value, bound)
}

/// Breakpoints for the horizontal integrals: finer near σ where log ζ varies.
fn horizontal_breaks(sigma: f64, a: f64) -> Vec<f64> {
    let mut b = vec![sigma, sigma + 0.5, sigma + 1.5, 2.0, sigma + 4.0, sigma + 12.0, a];
    b.retain(|&x| x >= sigma && x <= a);
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// Closed-form `∫ (α-σ)^{m-1}/(m-1)! Log(α + it - c) dα` over `[σ, b]`.
fn horizontal_factor_integral(m: u32, sigma: f64, b: f64, t: f64, center: Complex64) -> Complex64 {
    let shift = center - Complex64::new(sigma, t);
    let q = scaled_binomial((m - 1) as usize, Complex64::new(1.0, 0.0), shift);
    let u0 = Complex64::new(sigma - center.re, t - center.im);
    let u1 = Complex64::new(b - center.re, t - center.im);
    poly_log_integral(&q, u0, u1)
}

/// Left of the anchor the logarithmic factors are split off and integrated in
/// closed form; right of it log ζ is smooth and integrated directly.
fn weighted_on_ray(ray: &LogZetaRay, m: u32, sigma: f64, quad: &QuadSpec) -> Result<(Complex64, f64)> {
    let a = quad.cutoff(sigma);
    let split = BRANCH_ANCHOR.max(sigma);
    let t = ray.t();
    let fact = factorial(m - 1);
    let weight = |alpha: f64| (alpha - sigma).powi(m as i32 - 1) / fact;
    let numeric = integrate(
        |alpha| {
            let f = if alpha < split { ray.log_h(alpha)? } else { ray.log_zeta(alpha)? };
            Ok(f * weight(alpha))
        },
        &horizontal_breaks(sigma, a),
        quad.adaptive(quad.abs_tol),
    )?;
    let analytic: Complex64 = if split > sigma {
        ray.factors().iter().map(|f| horizontal_factor_integral(m, sigma, split, t, f.center) * f.order).sum()
    } else {
        Complex64::new(0.0, 0.0)
    };
    let (tail, tail_bound) = horizontal_tail(m, sigma, a, t);
    let zeta_budget = quad.eval.tol * (a - sigma).powi(m as i32) / factorial(m);
    Ok((numeric.value + analytic + tail, numeric.error + tail_bound + zeta_budget))
}

/// `η̃_m(σ+it)` from the single weighted integral over `[σ, A]` plus the tail.
pub fn eta_tilde_weighted(m: u32, sigma: f64, t: f64, table: &ZeroTable, quad: &QuadSpec) -> Result<EtaValue> {
    check_horizontal(m, sigma, t, table, quad)?;
    let ray = LogZetaRay::new(t, sigma, table, &quad.eval)?;
    let (value, est_error) = weighted_on_ray(&ray, m, sigma, quad)?;
    Ok(EtaValue { m, point: ComplexPoint { sigma, t }, value, est_error })
}

/// Panels for the nested route. Graded towards the pole when the ray runs
/// close to it, since there log ζ has a logarithmic singularity.
fn recursive_panels(sigma: f64, a: f64, t: f64) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    let mut x = sigma;
    while x < a {
        pts.push(x);
        let w = if x < sigma + 4.0 {
            0.25
        } else if x < sigma + 12.0 {
            1.0
        } else {
            4.0
        };
        x += w;
    }
    pts.push(a);
    if t.abs() < 0.5 && sigma < 1.0 + 0.25 {
        pts.push(1.0);
        for k in 0..36 {
            let d = 0.25 * 0.5f64.powi(k);
            pts.push(1.0 + d);
            pts.push(1.0 - d);
        }
    }
    pts.retain(|&p| p >= sigma && p <= a);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Nested quadrature with cached panel integrals:
/// `F_k(α) = ∫_α^A F_{k-1} + η̃_k(A)` with `F_0 = log ζ`.
struct Nested<'a> {
    ray: &'a LogZetaRay,
    panels: Vec<(f64, f64)>,
    // suffix[k][j] = Σ_{i ≥ j} ∫_{panel i} F_{k-1}
    suffix: Vec<Vec<Complex64>>,
    tails: Vec<Complex64>,
}

impl Nested<'_> {
    fn eval(&self, k: usize, alpha: f64, j: usize) -> Result<Complex64> {
        if k == 0 {
            return self.ray.log_zeta(alpha);
        }
        let b = self.panels[j].1;
        // slivers narrower than this contribute below 1e-11 even at the pole
        let partial = if b - alpha > 1e-13 {
            gk15(&mut |x| self.eval(k - 1, x, j), alpha, b)?.value
        } else {
            Complex64::new(0.0, 0.0)
        };
        Ok(partial + self.suffix[k][j + 1] + self.tails[k])
    }
}

/// `η̃_m(σ+it)` by iterating the single integral `m` times. Independent of the
/// weighted route for `m ≥ 2`; for `m = 1` the two coincide.
pub fn eta_tilde_recursive(m: u32, sigma: f64, t: f64, table: &ZeroTable, quad: &QuadSpec) -> Result<EtaValue> {
    check_horizontal(m, sigma, t, table, quad)?;
    if m == 1 {
        return eta_tilde_weighted(m, sigma, t, table, quad);
    }
    let a = quad.cutoff(sigma);
    let ray = LogZetaRay::new(t, sigma, table, &quad.eval)?;
    let panels = recursive_panels(sigma, a, t);
    let np = panels.len();
    let mut nested = Nested {
        ray: &ray,
        panels,
        suffix: vec![vec![Complex64::new(0.0, 0.0); np + 1]],
        tails: vec![Complex64::new(0.0, 0.0)],
    };
    let mut est_error = 0.0;
    for k in 1..=m as usize {
        let pieces: Vec<Integral> = (0..np)
            .into_par_iter()
            .map(|j| {
                let (lo, hi) = nested.panels[j];
                gk15(&mut |x| nested.eval(k - 1, x, j), lo, hi)
            })
            .collect::<Result<_>>()?;
        let mut suffix = vec![Complex64::new(0.0, 0.0); np + 1];
        for j in (0..np).rev() {
            suffix[j] = suffix[j + 1] + pieces[j].value;
        }
        let (tail, bound) = horizontal_tail(k as u32, a, a, t);
        let level_error: f64 = pieces.iter().map(|p| p.error).sum::<f64>() + bound;
        // errors at level k are integrated m - k more times over [σ, A]
        let spread = (a - sigma).powi((m as usize - k) as i32) / factorial(m - k as u32);
        est_error += level_error * spread;
        nested.suffix.push(suffix);
        nested.tails.push(tail);
    }
    let value = nested.suffix[m as usize][0] + nested.tails[m as usize];
    est_error += quad.eval.tol * (a - sigma).powi(m as i32) / factorial(m);
    Ok(EtaValue { m, point: ComplexPoint { sigma, t }, value, est_error })
}

/// `c_m(σ) = i^m η̃_m(σ)`, the constants of the vertical recursion.
pub fn c_m(m: u32, sigma: f64, quad: &QuadSpec) -> Result<Complex64> {
    Ok(c_m_value(m, sigma, quad)?.value)
}

fn c_m_value(m: u32, sigma: f64, quad: &QuadSpec) -> Result<EtaValue> {
    let mut v = eta_tilde_weighted(m, sigma, 0.0, &ZeroTable::empty(), quad)?;
    v.value *= i_pow(m);
    Ok(v)
}

/// Zeros whose log-singularity matters on the vertical line at `sigma`.
fn vertical_zeros(table: &ZeroTable, sigma: f64, t: f64, pad: f64) -> Vec<ZeroRecord> {
    table.zeros().iter().filter(|z| z.beta + 0.25 >= sigma && z.gamma - pad < t).copied().collect()
}

/// `η_m(σ+it)` along the vertical path from the real axis.
pub fn eta_vertical(m: u32, sigma: f64, t: f64, table: &ZeroTable, quad: &QuadSpec) -> Result<EtaValue> {
    check_order(m)?;
    check_sigma(sigma)?;
    if !(t > 0.0) || t > MAX_HEIGHT {
        return Err(Error::invalid(format!("t must be in (0, {MAX_HEIGHT}], got {t}")));
    }
    quad.validate(sigma)?;
    if sigma < 1.0 && t > table.coverage() {
        return Err(Error::TableCoverage { t, coverage: table.coverage() });
    }

    let mut value = Complex64::new(0.0, 0.0);
    let mut est_error = 0.0;
    for j in 1..=m {
        let c = c_m_value(j, sigma, quad)?;
        let w = t.powi((m - j) as i32) / factorial(m - j);
        value += c.value * w;
        est_error += c.est_error * w;
    }

    let pad = quad.singularity_pad;
    let zeros = vertical_zeros(table, sigma, t, pad);
    let fact = factorial(m - 1);
    let weight = |tp: f64| (t - tp).powi(m as i32 - 1) / fact;

    let mut breaks = vec![0.0, t];
    for z in &zeros {
        for b in [z.gamma - pad, z.gamma, z.gamma + pad] {
            if b > 0.0 && b < t {
                breaks.push(b);
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let local_log = |z: &ZeroRecord, tp: f64| -> Complex64 {
        let im = if tp < z.gamma { -(z.gamma - tp) } else { tp - z.gamma };
        Complex64::new(sigma - z.beta, im).ln() * z.multiplicity as f64
    };
    let numeric = integrate(
        |tp| {
            let ray = LogZetaRay::new(tp, sigma, table, &quad.eval)?;
            let mut f = ray.log_zeta(sigma)?;
            let lo = zeros.partition_point(|z| z.gamma < tp - pad);
            for z in zeros[lo..].iter().take_while(|z| z.gamma <= tp + pad) {
                if (tp - z.gamma).abs() < pad {
                    f -= local_log(z, tp);
                }
            }
            Ok(f * weight(tp))
        },
        &breaks,
        quad.adaptive(quad.abs_tol),
    )?;
    value += numeric.value;
    est_error += numeric.error + quad.eval.tol * t.powi(m as i32) / factorial(m);

    // closed form of mult · ∫ weight · Log(σ - β + i(t' - γ)) inside each window
    let minus_i = Complex64::new(0.0, -1.0);
    for z in &zeros {
        let lo = (z.gamma - pad).max(0.0);
        let hi = (z.gamma + pad).min(t);
        if hi <= lo {
            continue;
        }
        let d = sigma - z.beta;
        let q = scaled_binomial((m - 1) as usize, Complex64::new(0.0, 1.0), Complex64::new(t - z.gamma, -d));
        let mut part = Complex64::new(0.0, 0.0);
        if lo < z.gamma {
            let top = hi.min(z.gamma);
            part += poly_log_integral(&q, Complex64::new(d, -(z.gamma - lo)), Complex64::new(d, -(z.gamma - top)));
        }
        if hi > z.gamma {
            let bottom = lo.max(z.gamma);
            part += poly_log_integral(&q, Complex64::new(d, bottom - z.gamma), Complex64::new(d, hi - z.gamma));
        }
        value += part * minus_i * z.multiplicity as f64;
    }

    Ok(EtaValue { m, point: ComplexPoint { sigma, t }, value, est_error })
}

/// Inner-index terms of `Y_m(σ+it)` over zeros with `β > σ`, `0 < γ < t`.
pub fn y_m_terms(m: u32, sigma: f64, t: f64, table: &ZeroTable) -> Vec<ZeroSumTerm> {
    let zeros = zeros_in_box(table, sigma, t);
    (0..m)
        .map(|k| {
            let coeff = i_pow(m - 1 - k) * (2.0 * std::f64::consts::PI / (factorial(m - k) * factorial(k)));
            let s: f64 = zeros
                .iter()
                .map(|z| z.multiplicity as f64 * (z.beta - sigma).powi((m - k) as i32) * (t - z.gamma).powi(k as i32))
                .sum();
            ZeroSumTerm { k, contribution: coeff * s }
        })
        .collect()
}

pub fn y_m(m: u32, sigma: f64, t: f64, table: &ZeroTable) -> Complex64 {
    y_m_terms(m, sigma, t, table).iter().map(|z| z.contribution).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BridgeCheck {
    pub vertical: EtaValue,
    pub horizontal: EtaValue,
    pub zero_sum: Complex64,
    /// `|η_m - (i^m η̃_m + Y_m)|`.
    pub residual: f64,
    /// Combined error estimate of the two quadratures.
    pub budget: f64,
}

pub fn check_bridge(m: u32, sigma: f64, t: f64, table: &ZeroTable, quad: &QuadSpec) -> Result<BridgeCheck> {
    let (vertical, horizontal) =
        rayon::join(|| eta_vertical(m, sigma, t, table, quad), || eta_tilde_weighted(m, sigma, t, table, quad));
    let (vertical, horizontal) = (vertical?, horizontal?);
    let zero_sum = y_m(m, sigma, t, table);
    let residual = (vertical.value - (i_pow(m) * horizontal.value + zero_sum)).norm();
    Ok(BridgeCheck { vertical, horizontal, zero_sum, residual, budget: vertical.est_error + horizontal.est_error })
}

/// `|η_m - Y_m| / log t` at each sample height.
pub fn growth_check(
    m: u32,
    sigma: f64,
    t_samples: &[f64],
    table: &ZeroTable,
    quad: &QuadSpec,
) -> Result<Vec<(f64, f64)>> {
    if let Some(&bad) = t_samples.iter().find(|&&t| !(t > std::f64::consts::E)) {
        return Err(Error::invalid(format!("growth check needs t > e, got {bad}")));
    }
    t_samples
        .par_iter()
        .map(|&t| {
            let eta = eta_vertical(m, sigma, t, table, quad)?;
            Ok((t, (eta.value - y_m(m, sigma, t, table)).norm() / t.ln()))
        })
        .collect()
}
