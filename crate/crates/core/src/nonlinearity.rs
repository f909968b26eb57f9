//! Combined nonlinearities `N(s) = Σ c_j s^{β_j}` and the exponential series.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Default truncation used when a criterion needs the explicit term list of
/// the exponential series.
pub const DEFAULT_TRUNCATION: usize = 64;

/// Below this argument the exponential closed forms lose digits to
/// cancellation, so the (rapidly convergent) Taylor series is used instead.
const SMALL_ARG: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearTerm {
    pub coefficient: f64,
    pub exponent: f64,
}

impl NonlinearTerm {
    pub fn new(coefficient: f64, exponent: f64) -> Result<Self> {
        if !coefficient.is_finite() {
            return domain(format!("coefficient {coefficient} is not finite"));
        }
        if !exponent.is_finite() || exponent < 0.0 {
            return domain(format!("exponent {exponent} must be finite and >= 0"));
        }
        Ok(Self { coefficient, exponent })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Nonlinearity {
    /// Terms ordered by strictly increasing exponent.
    FiniteSum { terms: Vec<NonlinearTerm> },
    /// `e^s = Σ s^k / k!`; `truncation_order` only matters where a finite
    /// term list is required.
    ExponentialSeries { truncation_order: usize },
}

impl Nonlinearity {
    pub fn finite(terms: Vec<NonlinearTerm>) -> Result<Self> {
        let nl = Nonlinearity::FiniteSum { terms };
        nl.validate()?;
        Ok(nl)
    }

    /// Builds a finite sum from `(c, β)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let terms = pairs.iter().map(|&(c, b)| NonlinearTerm::new(c, b)).collect::<Result<Vec<_>>>()?;
        Self::finite(terms)
    }

    pub fn empty() -> Self {
        Nonlinearity::FiniteSum { terms: Vec::new() }
    }

    pub fn exponential(truncation_order: usize) -> Result<Self> {
        let nl = Nonlinearity::ExponentialSeries { truncation_order };
        nl.validate()?;
        Ok(nl)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Nonlinearity::FiniteSum { terms } => {
                for t in terms {
                    NonlinearTerm::new(t.coefficient, t.exponent)?;
                }
                if terms.windows(2).any(|w| w[1].exponent <= w[0].exponent) {
                    return domain("exponents must be strictly increasing");
                }
                Ok(())
            }
            Nonlinearity::ExponentialSeries { truncation_order } => {
                if *truncation_order < 8 {
                    return domain(format!(
                        "truncation order {truncation_order} < 8 drops the supercritical powers"
                    ));
                }
                Ok(())
            }
        }
    }

    /// Explicit term list; the exponential series is cut after `k = truncation_order`.
    pub fn terms(&self) -> Vec<NonlinearTerm> {
        match self {
            Nonlinearity::FiniteSum { terms } => terms.clone(),
            Nonlinearity::ExponentialSeries { truncation_order } => {
                let mut out = Vec::with_capacity(truncation_order + 1);
                let mut inv_fact = 1.0;
                for k in 0..=*truncation_order {
                    if k > 0 {
                        inv_fact /= k as f64;
                    }
                    out.push(NonlinearTerm { coefficient: inv_fact, exponent: k as f64 });
                }
                out
            }
        }
    }

    /// The exponential series cut to a finite sum; finite sums are returned unchanged.
    pub fn truncated(&self) -> Nonlinearity {
        Nonlinearity::FiniteSum { terms: self.terms() }
    }

    pub fn is_exponential(&self) -> bool {
        matches!(self, Nonlinearity::ExponentialSeries { .. })
    }

    /// `N(s)`.
    pub fn eval(&self, s: f64) -> Result<f64> {
        check_arg(s)?;
        Ok(self.eval_unchecked(s))
    }

    /// `G(s) = Σ c s^{β+2}/(β+2)`, the energy potential density.
    pub fn potential_density(&self, s: f64) -> Result<f64> {
        check_arg(s)?;
        Ok(self.potential_unchecked(s))
    }

    /// `W(s) = Σ c β/(β+2) s^{β+2}`, the nonlinear weight in the virial identity.
    pub fn virial_weight_density(&self, s: f64) -> Result<f64> {
        check_arg(s)?;
        Ok(self.virial_unchecked(s))
    }

    pub(crate) fn eval_unchecked(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::FiniteSum { terms } => {
                terms.iter().map(|t| t.coefficient * pow(s, t.exponent)).sum()
            }
            Nonlinearity::ExponentialSeries { .. } => s.exp(),
        }
    }

    pub(crate) fn potential_unchecked(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::FiniteSum { terms } => {
                terms.iter().map(|t| t.coefficient * pow(s, t.exponent + 2.0) / (t.exponent + 2.0)).sum()
            }
            Nonlinearity::ExponentialSeries { .. } => {
                if s < SMALL_ARG {
                    exp_series(s, |k| 1.0 / (k + 2.0))
                } else {
                    (s - 1.0) * s.exp() + 1.0
                }
            }
        }
    }

    pub(crate) fn virial_unchecked(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::FiniteSum { terms } => terms
                .iter()
                .map(|t| t.coefficient * t.exponent / (t.exponent + 2.0) * pow(s, t.exponent + 2.0))
                .sum(),
            Nonlinearity::ExponentialSeries { .. } => {
                if s < SMALL_ARG {
                    exp_series(s, |k| k / (k + 2.0))
                } else {
                    s.exp() * (s * s - 2.0 * s + 2.0) - 2.0
                }
            }
        }
    }

    /// Potential contribution of each term, `c/(β+2)·∫|u|^{β+2}`, given a
    /// callback returning `∫|u|^r`. The exponential series yields one lumped entry.
    pub(crate) fn potential_terms_with<F: Fn(f64) -> f64>(&self, integral_pow: F) -> Vec<f64> {
        match self {
            Nonlinearity::FiniteSum { terms } => terms
                .iter()
                .map(|t| t.coefficient / (t.exponent + 2.0) * integral_pow(t.exponent + 2.0))
                .collect(),
            Nonlinearity::ExponentialSeries { .. } => Vec::new(),
        }
    }
}

fn check_arg(s: f64) -> Result<()> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::Domain(format!("argument {s} must be finite and >= 0")));
    }
    Ok(())
}

/// `s^β` with the convention `0^0 = 1`.
#[inline]
pub(crate) fn pow(s: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        1.0
    } else if beta == beta.trunc() && beta.abs() < 64.0 {
        s.powi(beta as i32)
    } else {
        s.powf(beta)
    }
}

/// `Σ_k w(k) s^{k+2}/k!` for `s < 1`; 30 terms reach machine precision.
fn exp_series(s: f64, w: impl Fn(f64) -> f64) -> f64 {
    let mut term = s * s;
    let mut sum = 0.0;
    for k in 0..30 {
        if k > 0 {
            term *= s / k as f64;
        }
        sum += w(k as f64) * term;
    }
    sum
}
