//! Gauss–Kronrod quadrature for complex-valued integrands on real intervals,
//! and closed-form integrals of `polynomial × Log(u)` along straight paths.
//!
//! The adaptive driver is global (always bisects the panel with the largest
//! error estimate) and fully deterministic: ties are broken by panel position,
//! and the final sum is accumulated left to right.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// 7-point Gauss weights, attached to XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Result of a quadrature: value, error estimate and number of integrand calls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub evals: usize,
}

impl Integral {
    pub const ZERO: Integral = Integral { value: Complex64::new(0.0, 0.0), error: 0.0, evals: 0 };
}

impl std::ops::Add for Integral {
    type Output = Integral;

    fn add(self, other: Integral) -> Integral {
        Integral { value: self.value + other.value, error: self.error + other.error, evals: self.evals + other.evals }
    }
}

/// One 15-point Kronrod panel with the QUADPACK error rescaling.
pub fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<Integral>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center)?;
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut abs_sum = f_center.norm() * WGK[7];
    let mut values = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 7];
    for (j, x) in XGK.iter().take(7).enumerate() {
        let dx = half * x;
        let lo = f(center - dx)?;
        let hi = f(center + dx)?;
        values[j] = (lo, hi);
        kronrod += (lo + hi) * WGK[j];
        abs_sum += (lo.norm() + hi.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (lo + hi) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = (f_center - mean).norm() * WGK[7];
    for (j, (lo, hi)) in values.iter().enumerate() {
        asc += ((lo - mean).norm() + (hi - mean).norm()) * WGK[j];
    }
    let value = kronrod * half;
    let abs_value = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).norm();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_value > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_value);
    }
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::EvalFailure(format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok(Integral { value, error, evals: 15 })
}

/// Tuning for [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct Adaptive {
    pub abs_tol: f64,
    /// Maximum number of bisections applied to any one initial panel.
    pub max_depth: u32,
    pub max_panels: usize,
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    est: Integral,
}

/// Globally adaptive integration over consecutive panels given by `breaks`.
pub fn integrate<F>(mut f: F, breaks: &[f64], opts: Adaptive) -> Result<Integral>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    if breaks.len() < 2 {
        return Ok(Integral::ZERO);
    }
    let mut panels = Vec::with_capacity(breaks.len() * 4);
    let mut evals = 0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let est = gk15(&mut f, w[0], w[1])?;
            evals += est.evals;
            panels.push(Panel { a: w[0], b: w[1], depth: 0, est });
        }
    }
    loop {
        let total: f64 = panels.iter().map(|p| p.est.error).sum();
        if total <= opts.abs_tol {
            break;
        }
        let (idx, worst) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.est.error.total_cmp(&y.1.est.error).then(y.0.cmp(&x.0)))
            .map(|(i, p)| (i, *p))
            .expect("non-empty panel list");
        if worst.depth >= opts.max_depth || panels.len() >= opts.max_panels {
            return Err(Error::QuadratureNonconvergence { a: worst.a, b: worst.b, error: total, tol: opts.abs_tol });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureNonconvergence { a: worst.a, b: worst.b, error: total, tol: opts.abs_tol });
        }
        let left = gk15(&mut f, worst.a, mid)?;
        let right = gk15(&mut f, mid, worst.b)?;
        evals += 30;
        panels[idx] = Panel { a: worst.a, b: mid, depth: worst.depth + 1, est: left };
        panels.insert(idx + 1, Panel { a: mid, b: worst.b, depth: worst.depth + 1, est: right });
    }
    let mut out = Integral::ZERO;
    for p in &panels {
        out = out + Integral { evals: 0, ..p.est };
    }
    out.evals = evals;
    Ok(out)
}

/// Antiderivative of `u^k Log(u)`; zero at the origin.
fn log_power_antiderivative(k: usize, u: Complex64) -> Complex64 {
    if u == Complex64::new(0.0, 0.0) {
        return Complex64::new(0.0, 0.0);
    }
    let kp1 = (k + 1) as f64;
    u.powu(k as u32 + 1) / kp1 * (u.ln() - 1.0 / kp1)
}

/// `∫ Q(u) Log(u) du` along the straight segment `u0 → u1`, where `q` holds the
/// coefficients of `Q` from the constant term upward.
///
/// The principal logarithm must be continuous on the open segment; the
/// endpoints may sit on the branch cut or at the origin, with the side chosen
/// by the sign of the imaginary zero.
pub fn poly_log_integral(q: &[Complex64], u0: Complex64, u1: Complex64) -> Complex64 {
    q.iter().enumerate().map(|(k, c)| c * (log_power_antiderivative(k, u1) - log_power_antiderivative(k, u0))).sum()
}

/// Coefficients of `(scale·u + shift)^n / n!` in powers of `u`.
pub fn scaled_binomial(n: usize, scale: Complex64, shift: Complex64) -> Vec<Complex64> {
    let mut fact = 1.0;
    for j in 2..=n {
        fact *= j as f64;
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut binom = 1.0;
    for k in 0..=n {
        if k > 0 {
            binom = binom * (n - k + 1) as f64 / k as f64;
        }
        coeffs.push(scale.powu(k as u32) * shift.powu((n - k) as u32) * (binom / fact));
    }
    coeffs
}
