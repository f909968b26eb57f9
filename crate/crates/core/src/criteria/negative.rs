//! Negative-energy criteria for the exponential nonlinearity and for sums of
//! nonnegative power terms.

use crate::constants::{
    exponential_kappa, sharp_interp_constant, theta_grid, KappaVariant, THETA_GRID_POINTS,
};
use crate::nonlinearity::{NonlinearTerm, Nonlinearity};
use crate::observables::Observables;

use super::{push_note, CriterionId, CriterionParameters, CriterionReport};

/// `E + κM < 0`; `refined` splits the shared budget optimally instead of in thirds.
pub fn check_exponential_negative(obs: &Observables, refined: bool) -> CriterionReport {
    let (id, variant) = if refined {
        (CriterionId::ExponentialNegativeRefined, KappaVariant::MainProofOptimal)
    } else {
        (CriterionId::ExponentialNegative, KappaVariant::MainProof)
    };
    let k = match exponential_kappa(variant) {
        Ok(k) => k,
        Err(e) => return CriterionReport::not_applicable(id, e.to_string()),
    };
    let params = CriterionParameters {
        delta_k: k.delta_k.clone(),
        c_k: k.c_k.clone(),
        kappa: Some(k.kappa),
        ..Default::default()
    };
    CriterionReport::energy_threshold(id, obs.energy, obs.mass, k.kappa, params, String::new())
}

struct SubTerm {
    d: f64,
    alpha: f64,
}

/// Criterion for `N = Σ d_k|u|^{α_k}` with all `d_k ≥ 0`. `k*` is the first
/// term with `α ≥ 4`; the lower terms are absorbed into the mass using the
/// next positive term (main branch) or a θ-split of `k*` itself when it is
/// the last, strictly supercritical term (special branch).
pub fn check_general_sum_negative(nl: &Nonlinearity, obs: &Observables) -> CriterionReport {
    let id = CriterionId::GeneralSumNegative;
    let all = nl.terms();
    if all.iter().any(|t| t.coefficient < 0.0) {
        return CriterionReport::not_applicable(id, "a coefficient is negative (defocusing term)");
    }
    let terms: Vec<NonlinearTerm> = all.into_iter().filter(|t| t.coefficient > 0.0).collect();
    let Some(ks) = terms.iter().position(|t| t.exponent >= 4.0) else {
        return CriterionReport::not_applicable(id, "no critical or supercritical term");
    };
    let star = terms[ks];
    let sub: Vec<SubTerm> =
        terms[..ks].iter().map(|t| SubTerm { d: t.coefficient, alpha: t.exponent }).collect();
    let n_sub = sub.iter().filter(|s| s.alpha > 0.0).count();
    let mut notes = String::new();
    if nl.is_exponential() {
        push_note(&mut notes, &format!("series truncated after {} terms", terms.len()));
    }

    if let Some(next) = terms.get(ks + 1) {
        let budget =
            next.coefficient * (next.exponent - star.exponent) / (next.exponent + 2.0) / n_sub.max(1) as f64;
        let Some((sum, delta_k, c_k)) = absorb(&sub, |s| {
            (s.d * (star.exponent - s.alpha) / (s.alpha + 2.0), budget, next.exponent + 2.0)
        }) else {
            return CriterionReport::not_applicable(id, "no admissible interpolation budget");
        };
        let params = CriterionParameters { delta_k, c_k, ..Default::default() };
        push_note(
            &mut notes,
            &format!("k* exponent {}, budget from exponent {}", star.exponent, next.exponent),
        );
        return CriterionReport::energy_threshold(
            id,
            obs.energy,
            obs.mass,
            sum / star.exponent,
            params,
            notes,
        );
    }

    let id = CriterionId::GeneralSumNegativeSpecial;
    if !(star.exponent > 4.0) {
        return CriterionReport::not_applicable(
            id,
            "critical term is the last positive term; no supercritical term supplies the budget",
        );
    }
    let a = star.exponent;
    let mut best: Option<(f64, f64, Vec<f64>, Vec<f64>)> = None;
    for theta in theta_grid(4.0 / a, 1.0, THETA_GRID_POINTS) {
        let budget = star.coefficient / n_sub.max(1) as f64 * a * (1.0 - theta) / (a + 2.0);
        let Some((sum, dk, ck)) =
            absorb(&sub, |s| (s.d * (a * theta - s.alpha) / (s.alpha + 2.0), budget, a + 2.0))
        else {
            continue;
        };
        let t = sum / (a * theta);
        if t.is_finite() && best.as_ref().is_none_or(|b| t < b.0) {
            best = Some((t, theta, dk, ck));
        }
    }
    let Some((t, theta, delta_k, c_k)) = best else {
        return CriterionReport::not_applicable(id, "no admissible θ");
    };
    let params = CriterionParameters { theta: Some(theta), delta_k, c_k, ..Default::default() };
    push_note(&mut notes, &format!("k* exponent {a} is the last term"));
    CriterionReport::energy_threshold(id, obs.energy, obs.mass, t, params, notes)
}

/// `Σ A_k C_k` over the subcritical terms, where `spec(term)` gives the weight
/// `A_k`, the budget for `δ_k A_k` and the upper exponent `q`. Terms with
/// `α = 0` are the mass itself (`C = 1`, `δ = 0`).
fn absorb<F: Fn(&SubTerm) -> (f64, f64, f64)>(sub: &[SubTerm], spec: F) -> Option<(f64, Vec<f64>, Vec<f64>)> {
    let mut sum = 0.0;
    let mut delta_k = Vec::with_capacity(sub.len());
    let mut c_k = Vec::with_capacity(sub.len());
    for s in sub {
        let (w, budget, q) = spec(s);
        if s.alpha == 0.0 {
            sum += w;
            delta_k.push(0.0);
            c_k.push(1.0);
            continue;
        }
        if w == 0.0 {
            delta_k.push(0.0);
            c_k.push(0.0);
            continue;
        }
        if !(w > 0.0 && budget > 0.0) {
            return None;
        }
        let delta = budget / w;
        let c = sharp_interp_constant(s.alpha + 2.0, q, delta).ok()?.constant;
        sum += w * c;
        delta_k.push(delta);
        c_k.push(c);
    }
    Some((sum, delta_k, c_k))
}
