//! Closed-form conditions for the explicit data families, as printed and as
//! obtained by direct evaluation of the underlying integrals.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::log_gamma;
use crate::criteria::{evaluate_double_positive, DrConstant};
use crate::error::{domain, Result};
use crate::nonlinearity::Nonlinearity;

/// Series length used for the exponential sums.
pub const DEFAULT_SERIES_TERMS: usize = 100;

const TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedForm {
    /// Chirped Gaussian with exponential nonlinearity, parameters `(θ, A)`.
    SubCondition2Exp,
    /// Weighted data with `n = 2` and exponential nonlinearity, `(θ, A)`.
    WeightedExp,
    /// Positive Gaussian, `p = 5`, `q = 7`, `ε₁ = −1`, `ε₂ = 1`, parameter `A`.
    P5q7,
    /// Polynomial decay `A/(1+x²)`, same nonlinearity as `P5q7`.
    Poly,
}

impl ClosedForm {
    pub const ALL: [ClosedForm; 4] =
        [ClosedForm::SubCondition2Exp, ClosedForm::WeightedExp, ClosedForm::P5q7, ClosedForm::Poly];

    pub fn name(self) -> &'static str {
        match self {
            ClosedForm::SubCondition2Exp => "subcondition2-exp",
            ClosedForm::WeightedExp => "weighted-exp",
            ClosedForm::P5q7 => "p5q7",
            ClosedForm::Poly => "poly",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .map_or_else(|| domain(format!("unknown closed form '{s}'")), Ok)
    }

    /// Whether `θ` is a parameter (two-dimensional family).
    pub fn uses_theta(self) -> bool {
        matches!(self, ClosedForm::SubCondition2Exp | ClosedForm::WeightedExp)
    }

    /// Whether the condition is a positive-energy one with an energy sign to report.
    pub fn is_positive_energy(self) -> bool {
        !self.uses_theta()
    }
}

/// One side-by-side verdict `lhs < rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Side {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

impl Side {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { holds: lhs < rhs, lhs, rhs }
    }

    /// `rhs − lhs`, positive iff the condition holds.
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormResult {
    pub which: ClosedForm,
    pub theta: f64,
    pub a: f64,
    pub printed: Side,
    pub direct: Side,
    /// Energy from the printed expression (positive-energy families).
    pub energy_printed: Option<f64>,
    /// Energy from direct integration (positive-energy families).
    pub energy_direct: Option<f64>,
    /// Magnitude of the last retained series term relative to the sum.
    pub series_tail: Option<f64>,
    pub series_converged: bool,
}

impl ClosedFormResult {
    pub fn disagree(&self) -> bool {
        self.printed.holds != self.direct.holds
    }
}

struct Series {
    sum: f64,
    tail: f64,
}

/// `Σ_k w(k)·A^k/k!` for `k = 0..terms`.
fn exp_series<F: Fn(f64) -> f64>(a: f64, terms: usize, w: F) -> Series {
    let mut sum = 0.0;
    let mut coeff = 1.0;
    let mut last = 0.0;
    for k in 0..terms {
        if k > 0 {
            coeff *= a / k as f64;
        }
        last = coeff * w(k as f64);
        sum += last;
    }
    let tail = if sum != 0.0 { (last / sum).abs() } else { 0.0 };
    Series { sum, tail }
}

fn gamma_ratio(x: f64, y: f64) -> f64 {
    (log_gamma(x).expect("positive argument") - log_gamma(y).expect("positive argument")).exp()
}

fn check_params(which: ClosedForm, theta: f64, a: f64, terms: usize) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return domain(format!("amplitude A = {a} must be positive"));
    }
    if which.uses_theta() && !(theta >= 0.0 && theta.is_finite()) {
        return domain(format!("θ = {theta} must be nonnegative"));
    }
    if terms == 0 {
        return domain("series needs at least one term");
    }
    Ok(())
}

/// Evaluates one closed-form condition, printed and direct.
pub fn closed_form_condition(
    which: ClosedForm,
    theta: f64,
    a: f64,
    terms: usize,
) -> Result<ClosedFormResult> {
    check_params(which, theta, a, terms)?;
    let mut out = ClosedFormResult {
        which,
        theta,
        a,
        printed: Side::new(0.0, 0.0),
        direct: Side::new(0.0, 0.0),
        energy_printed: None,
        energy_direct: None,
        series_tail: None,
        series_converged: true,
    };
    match which {
        ClosedForm::SubCondition2Exp => {
            let s = exp_series(a, terms, |k| (k + 2.0).powf(-1.5));
            let lhs = 4.0 * theta * theta + 1.0;
            out.printed = Side::new(lhs, 2.0 * s.sum);
            out.direct = Side::new(lhs, 4.0 * 2f64.sqrt() * s.sum);
            out.series_tail = Some(s.tail);
            out.series_converged = s.tail < TAIL_TOLERANCE;
        }
        ClosedForm::WeightedExp => {
            let sp = PI.sqrt();
            let printed = exp_series(a, terms, |k| gamma_ratio(k + 1.5, k + 3.0) / (k + 2.0));
            let direct = exp_series(a, terms, |k| gamma_ratio(k + 1.5, k + 2.0) / (k + 2.0));
            out.printed = Side::new((5.0 * PI * theta * theta + 8.0 * PI) / 64.0, sp * printed.sum);
            out.direct = Side::new((5.0 * PI * theta * theta + 32.0 * PI) / 256.0, sp * direct.sum);
            let tail = printed.tail.max(direct.tail);
            out.series_tail = Some(tail);
            out.series_converged = tail < TAIL_TOLERANCE;
        }
        ClosedForm::P5q7 => {
            let (a2, a4, a6) = (a * a, a.powi(4), a.powi(6));
            let f = 7.0 * 2f64.powf(2.5) * 6f64.powf(6.5) * 8f64.powf(8.5)
                + 11.0 * 9.0 * 7.0 * 5.0 * 3.0 * 8f64.powf(8.5) * 4.0 * a4
                - 15.0 * 13.0 * 11.0 * 9.0 * 7.0 * 5.0 * 3.0 * 6f64.powf(6.5) * a6;
            let lhs = 125.0 * 2f64.powf(8.5) * PI / (6f64.powf(6.5) * 8f64.powf(8.5));
            out.printed = Side::new(lhs, a4 * (25.0 * PI * PI * 32.0 + 36.0 * PI * a4) / f);
            out.energy_printed = Some(a2 * PI.sqrt() / (6f64.powf(5.5) * 8f64.powf(8.5) * 256.0) * f);
            let mass = a2 * (PI / 2.0).sqrt();
            let energy =
                mass / 2.0 + a.powi(6) * (PI / 6.0).sqrt() / 6.0 - a.powi(8) * (PI / 8.0).sqrt() / 8.0;
            out.direct = shortcut(mass, mass / 4.0, energy)?;
            out.energy_direct = Some(energy);
        }
        ClosedForm::Poly => {
            let (a2, a6, a8) = (a * a, a.powi(6), a.powi(8));
            let lhs = 1.0;
            let den = 6.0 * PI * a2 + 63.0 * PI / 32.0 * a6 - 1287.0 / 1024.0 * a8;
            out.printed = Side::new(lhs, (2.0 + a2 / 2.0) / den);
            let mass = PI * a2 / 2.0;
            let energy = PI * a2 / 8.0 + a6 * PI.sqrt() * gamma_ratio(5.5, 6.0) / 6.0
                - a8 * PI.sqrt() * gamma_ratio(7.5, 8.0) / 8.0;
            out.energy_printed = Some(energy);
            out.direct = shortcut(mass, mass, energy)?;
            out.energy_direct = Some(energy);
        }
    }
    Ok(out)
}

/// Real-data shortcut `V < V_max` for `p = 5`, `q = 7`, `ε₁ = −1`.
fn shortcut(mass: f64, variance: f64, energy: f64) -> Result<Side> {
    if !(energy > 0.0) {
        return Ok(Side { holds: false, lhs: variance, rhs: f64::NEG_INFINITY });
    }
    let ev = evaluate_double_positive(-1.0, 5.0, 7.0, mass, energy, variance, 0.0, DrConstant::Sharp)?;
    Ok(Side::new(variance, ev.v_max))
}

/// Chirped-Gaussian negative-energy condition for a general nonlinearity.
/// `printed` selects the printed normalisation `2Σ`, otherwise `4√2Σ`.
pub fn subcondition2(nl: &Nonlinearity, theta: f64, a: f64, printed: bool) -> Result<Side> {
    nl.validate()?;
    check_params(ClosedForm::SubCondition2Exp, theta, a, 1)?;
    let sum: f64 =
        nl.terms().iter().map(|t| t.coefficient * a.powf(t.exponent) * (t.exponent + 2.0).powf(-1.5)).sum();
    let factor = if printed { 2.0 } else { 4.0 * 2f64.sqrt() };
    Ok(Side::new(4.0 * theta * theta + 1.0, factor * sum))
}

/// Negative-energy condition `E[v₀] < 0` for `v₀ = A e^{−iθ/⟨x⟩}/⟨x⟩ⁿ`,
/// evaluated directly.
pub fn weighted_condition(nl: &Nonlinearity, n: f64, theta: f64, a: f64) -> Result<Side> {
    nl.validate()?;
    check_params(ClosedForm::WeightedExp, theta, a, 1)?;
    if !(n > 1.5) {
        return domain(format!("weighted data needs n > 3/2, got {n}"));
    }
    let sp = PI.sqrt();
    let lhs =
        sp / 4.0 * (theta * theta * gamma_ratio(n + 1.5, n + 3.0) + n * n * gamma_ratio(n + 0.5, n + 2.0));
    let rhs: f64 = nl
        .terms()
        .iter()
        .map(|t| {
            let s = n * (t.exponent + 2.0) / 2.0;
            t.coefficient * a.powf(t.exponent) / (t.exponent + 2.0) * sp * gamma_ratio(s - 0.5, s)
        })
        .sum();
    Ok(Side::new(lhs, rhs))
}

/// Printed vs direct moments for `A e^{−x²}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub quantity: String,
    pub printed: f64,
    pub direct: f64,
}

fn double_factorial(n: u32) -> f64 {
    (1..=n).rev().step_by(2).map(f64::from).product()
}

/// Comparison table for the positive Gaussian with `N = ε₁|u|^{p−1} + ε₂|u|^{q−1}`.
pub fn positive_gaussian_table(a: f64, eps1: f64, p: f64, eps2: f64, q: f64) -> Result<Vec<MomentRow>> {
    if !(a > 0.0 && a.is_finite()) {
        return domain(format!("amplitude A = {a} must be positive"));
    }
    if !(p.fract() == 0.0 && q.fract() == 0.0 && p >= 1.0 && q >= 1.0 && p <= 40.0 && q <= 40.0) {
        return domain("printed moments need integer exponents p, q in [1, 40]");
    }
    let sp = PI.sqrt();
    let a2 = a * a;
    let printed_term = |eps: f64, r: f64| {
        double_factorial(2 * r as u32 + 1) * eps * a.powf(r + 1.0) * sp
            / ((r + 1.0).powf(r + 1.5) * 2f64.powf(r + 1.0))
    };
    let direct_term = |eps: f64, r: f64| eps / (r + 1.0) * a.powf(r + 1.0) * (PI / (r + 1.0)).sqrt();
    let mass = a2 * (PI / 2.0).sqrt();
    let kinetic = mass / 2.0;
    let rows = vec![
        ("mass", 3.0 * a2 * sp / 2f64.powf(5.5), mass),
        ("variance", 15.0 * a2 * sp / 2f64.powf(6.5), mass / 4.0),
        ("kinetic", 7.0 * a2 * sp / 2f64.powf(5.5), kinetic),
        (
            "energy",
            7.0 * a2 * sp / 2f64.powf(5.5) - printed_term(eps1, p) - printed_term(eps2, q),
            kinetic - direct_term(eps1, p) - direct_term(eps2, q),
        ),
    ];
    Ok(rows
        .into_iter()
        .map(|(q, printed, direct)| MomentRow { quantity: q.to_string(), printed, direct })
        .collect())
}
