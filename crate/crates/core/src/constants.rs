//! Γ, the weighted interpolation constant `C*(p)`, sharp interpolation
//! constants `C(δ)` and the exponential-nonlinearity constant `κ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, with reflection below 1/2).
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("log_gamma argument {x} must be positive"));
    }
    Ok(ln_gamma(x))
}

fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    log_gamma(x).map(f64::exp)
}

/// Sharp constant of `‖u‖₂ ≤ C*(‖xu‖^{(p−1)/2}‖u‖_{p+1}^{p+1})^{2/(3p+1)}`.
pub fn sharp_cstar(p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return domain(format!("C*(p) needs p > 1, got {p}"));
    }
    let s = 3.0 * p + 1.0;
    let r = (p + 1.0) / (p - 1.0);
    let ln = 2.0 / s * (s / (2.0 * (p + 1.0))).ln()
        + (p - 1.0) / (2.0 * s) * (PI * s / (p - 1.0)).ln()
        + (p - 1.0) / s * (ln_gamma(r) - ln_gamma(r + 0.5));
    Ok(ln.exp())
}

/// Same constant evaluated factor by factor with `powf`, for cross-checking
/// the log-domain path.
pub fn sharp_cstar_direct(p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return domain(format!("C*(p) needs p > 1, got {p}"));
    }
    let s = 3.0 * p + 1.0;
    let r = (p + 1.0) / (p - 1.0);
    let ratio = gamma(r)? / gamma(r + 0.5)?;
    Ok((s / (2.0 * (p + 1.0))).powf(2.0 / s)
        * (PI * s / (p - 1.0)).powf((p - 1.0) / (2.0 * s))
        * ratio.powf((p - 1.0) / s))
}

/// `C*(5) = (4π²/3)^{1/8}`.
pub fn cstar_p5() -> f64 {
    (4.0 * PI * PI / 3.0).powf(0.125)
}

/// `a^p ≤ C a² + δ a^q` for all `a > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationBudget {
    pub p: f64,
    pub q: f64,
    pub delta: f64,
    pub constant: f64,
}

impl InterpolationBudget {
    /// `C a² + δ a^q − a^p`.
    pub fn slack(&self, a: f64) -> f64 {
        self.constant * a * a + self.delta * a.powf(self.q) - a.powf(self.p)
    }
}

fn check_exponents(p: f64, q: f64, delta: f64) -> Result<()> {
    if !(p > 2.0 && q > p && q.is_finite()) {
        return domain(format!("need 2 < p < q, got p = {p}, q = {q}"));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return domain(format!("delta = {delta} must be positive"));
    }
    Ok(())
}

/// `sup_{a>0} a^{p−2} − δ a^{q−2}` on a log-grid spanning twelve decades
/// around `center`.
pub fn brute_force_sup(p: f64, q: f64, delta: f64, center: f64, points: usize) -> f64 {
    let lo = center.ln() - 6.0 * std::f64::consts::LN_10;
    let hi = center.ln() + 6.0 * std::f64::consts::LN_10;
    let mut best = f64::NEG_INFINITY;
    for i in 0..points {
        let a = (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp();
        let v = a.powf(p - 2.0) - delta * a.powf(q - 2.0);
        if v.is_finite() && v > best {
            best = v;
        }
    }
    best
}

/// Smallest `C` with `a^p ≤ C a² + δ a^q`:
/// `C = ((q−p)/(q−2))·(δ⁻¹(p−2)/(q−2))^{(p−2)/(q−p)}`, checked against
/// [`brute_force_sup`].
pub fn sharp_interp_constant(p: f64, q: f64, delta: f64) -> Result<InterpolationBudget> {
    check_exponents(p, q, delta)?;
    let base = (p - 2.0) / (delta * (q - 2.0));
    let ln_c = ((q - p) / (q - 2.0)).ln() + (p - 2.0) / (q - p) * base.ln();
    let constant = ln_c.exp();
    if !(constant.is_finite() && constant > 0.0) {
        return Err(Error::Overflow(format!("C(δ) for p={p}, q={q}, δ={delta}")));
    }
    let a_star = base.powf(1.0 / (q - p));
    if a_star.is_finite() && a_star > 0.0 {
        let sup = brute_force_sup(p, q, delta, a_star, 2001);
        if sup > constant * (1.0 + 1e-9) || sup < constant * (1.0 - 1e-3) {
            return Err(Error::Internal(format!(
                "sharp constant {constant} disagrees with brute-force sup {sup} (p={p}, q={q}, δ={delta})"
            )));
        }
    }
    Ok(InterpolationBudget { p, q, delta, constant })
}

/// The constant with outer exponent `(p−2)/(q−2)` in place of the sharp
/// `(p−2)/(q−p)`. Not sharp in general; exposed for comparison only.
pub fn sharp_interp_constant_printed(p: f64, q: f64, delta: f64) -> Result<f64> {
    check_exponents(p, q, delta)?;
    let base = (p - 2.0) / (delta * (q - 2.0));
    Ok((q - p) / (q - 2.0) * base.powf((p - 2.0) / (q - 2.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KappaVariant {
    /// Critical term used to absorb the subcritical ones, equal budget thirds.
    MainProof,
    /// Same splitting with the shared budget distributed optimally.
    MainProofOptimal,
    /// Splitting on the first supercritical term, θ ∈ (4/5, 1).
    CriticalFreeVariant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaComponents {
    pub variant: KappaVariant,
    pub kappa: f64,
    /// `Σ |A_k| C_k` for the main proof; `Σ (5−k)/((k+2)k!)` for the variant.
    pub inner_sum: f64,
    pub delta_k: Vec<f64>,
    pub c_k: Vec<f64>,
    pub theta: Option<f64>,
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Main-proof weights `|A_k| = (4−k)/((k+2)k!)`, k = 1..3.
fn main_weights() -> [f64; 3] {
    [1, 2, 3].map(|k| (4.0 - k as f64) / ((k as f64 + 2.0) * factorial(k)))
}

/// Shared `L^7` budget `1/(7·5!)`.
const MAIN_BUDGET: f64 = 1.0 / 840.0;

/// Midpoints of `count` equal cells of `(lo, hi)`.
pub fn theta_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + (i as f64 + 0.5) * (hi - lo) / count as f64).collect()
}

pub const THETA_GRID_POINTS: usize = 512;

pub fn exponential_kappa(variant: KappaVariant) -> Result<KappaComponents> {
    match variant {
        KappaVariant::MainProof => {
            let w = main_weights();
            let mut delta_k = Vec::new();
            let mut c_k = Vec::new();
            for (i, a) in w.iter().enumerate() {
                let k = (i + 1) as f64;
                let d = MAIN_BUDGET / 3.0 / a;
                delta_k.push(d);
                c_k.push(sharp_interp_constant(k + 2.0, 7.0, d)?.constant);
            }
            let inner: f64 = w.iter().zip(&c_k).map(|(a, c)| a * c).sum();
            Ok(KappaComponents {
                variant,
                kappa: 0.25 * (inner + 2.0),
                inner_sum: inner,
                delta_k,
                c_k,
                theta: None,
            })
        }
        KappaVariant::MainProofOptimal => {
            let w = main_weights();
            let items: Vec<(f64, f64, f64)> =
                w.iter().enumerate().map(|(i, a)| ((i + 1) as f64 + 2.0, 7.0, *a)).collect();
            let delta_k = optimal_budget_split(&items, MAIN_BUDGET)?;
            let c_k = items
                .iter()
                .zip(&delta_k)
                .map(|(&(p, q, _), &d)| sharp_interp_constant(p, q, d).map(|b| b.constant))
                .collect::<Result<Vec<_>>>()?;
            let inner: f64 = w.iter().zip(&c_k).map(|(a, c)| a * c).sum();
            Ok(KappaComponents {
                variant,
                kappa: 0.25 * (inner + 2.0),
                inner_sum: inner,
                delta_k,
                c_k,
                theta: None,
            })
        }
        KappaVariant::CriticalFreeVariant => {
            let a: Vec<f64> =
                (1..=4u32).map(|k| (5.0 - k as f64) / ((k as f64 + 2.0) * factorial(k))).collect();
            let weight_sum: f64 = a.iter().sum();
            let mut best: Option<KappaComponents> = None;
            for theta in theta_grid(0.8, 1.0, THETA_GRID_POINTS) {
                let share = 0.25 / (7.0 * factorial(4)) * (1.0 - theta) / theta;
                let mut delta_k = Vec::new();
                let mut c_k = Vec::new();
                for (i, ak) in a.iter().enumerate() {
                    let d = share / ak;
                    delta_k.push(d);
                    c_k.push(sharp_interp_constant(i as f64 + 3.0, 7.0, d)?.constant);
                }
                let kappa1 = c_k.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let kappa = weight_sum * kappa1 + 2.0;
                if best.as_ref().is_none_or(|b| kappa < b.kappa) {
                    best = Some(KappaComponents {
                        variant,
                        kappa,
                        inner_sum: weight_sum,
                        delta_k,
                        c_k,
                        theta: Some(theta),
                    });
                }
            }
            best.ok_or_else(|| Error::Internal("empty θ-grid".into()))
        }
    }
}

/// Splits `Σ δ_k w_k ≤ budget` to minimise `Σ w_k C(p_k, q_k, δ_k)` for items
/// `(p, q, w)`. Each summand is `K_k x_k^{-e_k}` in `x_k = δ_k w_k`, so the
/// optimum equalises the marginal costs; the multiplier is found by bisection.
pub fn optimal_budget_split(items: &[(f64, f64, f64)], budget: f64) -> Result<Vec<f64>> {
    if items.is_empty() {
        return Ok(Vec::new());
    }
    if !(budget > 0.0) {
        return domain("budget must be positive");
    }
    // w·C(δ) = w·K0·(x/w)^{-e} with K0 = C(δ=1).
    let coef: Vec<(f64, f64, f64)> = items
        .iter()
        .map(|&(p, q, w)| {
            check_exponents(p, q, 1.0)?;
            let e = (p - 2.0) / (q - p);
            let k0 = (q - p) / (q - 2.0) * ((p - 2.0) / (q - 2.0)).powf(e);
            Ok((e, w.powf(1.0 + e) * k0, w))
        })
        .collect::<Result<Vec<_>>>()?;
    // Marginal cost e·K·x^{-e-1} = μ gives x = (eK/μ)^{1/(e+1)}.
    let x_of = |ln_mu: f64| -> Vec<f64> {
        coef.iter().map(|&(e, k, _)| (((e * k).ln() - ln_mu) / (e + 1.0)).exp()).collect()
    };
    let total = |ln_mu: f64| x_of(ln_mu).iter().sum::<f64>();
    let (mut lo, mut hi) = (-700.0f64, 700.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) > budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let xs = x_of(hi);
    Ok(xs.iter().zip(&coef).map(|(x, &(_, _, w))| x / w).collect())
}
