//! Negative-energy criterion for `N = −λ₁|u|^{α₁} − λ₂|u|^{α₂} − λ₃|u|^{α₃}`.

use std::fmt;

use crate::constants::{sharp_interp_constant, theta_grid, THETA_GRID_POINTS};
use crate::observables::Observables;

use super::{push_note, CriterionId, CriterionParameters, CriterionReport};

/// Rows of the case table: sign pattern of `(λ₁, λ₂)` by number, position
/// of the critical power 4 among `α₁ < α₂` by letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TripleCase {
    C1,
    C2A,
    C2B,
    C2C,
    C3A,
    C3B,
    C3C,
    C4A,
    C4B,
    C4C,
}

impl fmt::Display for TripleCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TripleCase::C1 => "1",
            TripleCase::C2A => "2A",
            TripleCase::C2B => "2B",
            TripleCase::C2C => "2C",
            TripleCase::C3A => "3A",
            TripleCase::C3B => "3B",
            TripleCase::C3C => "3C",
            TripleCase::C4A => "4A",
            TripleCase::C4B => "4B",
            TripleCase::C4C => "4C",
        };
        f.write_str(s)
    }
}

/// Case for the given signs and exponents. A zero `λ` counts as
/// defocusing; an exponent equal to 4 counts as not supercritical.
pub fn classify_triple(lambda1: f64, lambda2: f64, alpha1: f64, alpha2: f64) -> TripleCase {
    let letter = if alpha1 > 4.0 {
        0
    } else if alpha2 > 4.0 {
        1
    } else {
        2
    };
    let pick = |a, b, c| [a, b, c][letter];
    match (lambda1 < 0.0, lambda2 < 0.0) {
        (false, false) => TripleCase::C1,
        (true, true) => pick(TripleCase::C2A, TripleCase::C2B, TripleCase::C2C),
        (false, true) => pick(TripleCase::C3A, TripleCase::C3B, TripleCase::C3C),
        (true, false) => pick(TripleCase::C4A, TripleCase::C4B, TripleCase::C4C),
    }
}

/// One interpolated term: weight `A ≥ 0` multiplying `‖u‖_p^p ≤ C‖u‖₂² + δ‖u‖_q^q`
/// with `δA` at its budget.
struct Term {
    delta: f64,
    c: f64,
    weighted: f64,
}

fn interpolate(p: f64, q: f64, weight: f64, budget: f64) -> Option<Term> {
    if weight == 0.0 {
        return Some(Term { delta: 0.0, c: 0.0, weighted: 0.0 });
    }
    if !(weight > 0.0 && budget > 0.0) {
        return None;
    }
    let delta = budget / weight;
    let c = sharp_interp_constant(p, q, delta).ok()?.constant;
    Some(Term { delta, c, weighted: weight * c })
}

struct Threshold {
    value: f64,
    theta: Option<f64>,
    terms: Vec<Term>,
}

fn fixed(terms: Option<Vec<Term>>, scale: f64) -> Option<Threshold> {
    let terms = terms?;
    let value = terms.iter().map(|t| t.weighted).sum::<f64>() / scale;
    Some(Threshold { value, theta: None, terms })
}

/// Minimises `eval(θ)` over the midpoint grid of `(lo, hi)`.
fn minimise<F: Fn(f64) -> Option<(f64, Vec<Term>)>>(lo: f64, hi: f64, eval: F) -> Option<Threshold> {
    let mut best: Option<Threshold> = None;
    for theta in theta_grid(lo, hi, THETA_GRID_POINTS) {
        if let Some((value, terms)) = eval(theta) {
            if value.is_finite() && best.as_ref().is_none_or(|b| value < b.value) {
                best = Some(Threshold { value, theta: Some(theta), terms });
            }
        }
    }
    best
}

/// Threshold `T` of `E < −T·M` for each table row.
fn threshold(case: TripleCase, l: [f64; 3], a: [f64; 3], notes: &mut String) -> Option<Threshold> {
    let [l1, l2, l3] = l.map(f64::abs);
    let [a1, a2, a3] = a;
    let q = a3 + 2.0;
    match case {
        TripleCase::C1 | TripleCase::C2A | TripleCase::C3A | TripleCase::C3B => {
            Some(Threshold { value: 0.0, theta: None, terms: Vec::new() })
        }
        TripleCase::C2B => {
            let w = l1 * (a2 - a1) / (a1 + 2.0);
            let budget = l3 * (a3 - a2) / (a3 + 2.0);
            fixed(interpolate(a1 + 2.0, q, w, budget).map(|t| vec![t]), a2)
        }
        TripleCase::C4A => {
            let w = l2 * (a2 - a1) / (a2 + 2.0);
            let budget = l3 * (a3 - a1) / (2.0 * (a3 + 2.0));
            fixed(interpolate(a2 + 2.0, q, w, budget).map(|t| vec![t]), a1)
        }
        TripleCase::C2C => minimise(4.0 / a3, 1.0, |th| {
            let budget = l3 * a3 * (1.0 - th) / (2.0 * (a3 + 2.0));
            let t1 = interpolate(a1 + 2.0, q, l1 * (a3 * th - a1) / (a1 + 2.0), budget)?;
            let t2 = interpolate(a2 + 2.0, q, l2 * (a3 * th - a2) / (a2 + 2.0), budget)?;
            Some(((t1.weighted + t2.weighted) / (a3 * th), vec![t1, t2]))
        }),
        TripleCase::C3C => minimise(4.0 / a3, 1.0, |th| {
            let budget = l3 * a3 * (1.0 - th) / (a3 + 2.0);
            let t = interpolate(a2 + 2.0, q, l2 * (a3 * th - a2) / (a2 + 2.0), budget)?;
            Some((t.weighted / (a3 * th), vec![t]))
        }),
        TripleCase::C4C => minimise(4.0 / a3, 1.0, |th| {
            let budget = l3 * a3 * (1.0 - th) / (2.0 * (a3 + 2.0));
            let t = interpolate(a1 + 2.0, q, l1 * (a3 * th - a1) / (a1 + 2.0), budget)?;
            Some((t.weighted / (a3 * th), vec![t]))
        }),
        TripleCase::C4B => {
            let mut lo = ((a2 - 4.0) / (a3 - a2)).max(0.0);
            if lo >= 1.0 {
                push_note(notes, "θ interval ((α₂−4)/(α₃−α₂), 1) is empty; searched (0, 1)");
                lo = 0.0;
            }
            minimise(lo, 1.0, |th| {
                let s = (a3 - a2) * th;
                let budget = l3 * (a3 - a2) * (1.0 - th) / (a3 + 2.0);
                let t = interpolate(a1 + 2.0, q, l1 * (s + a2 - a1) / (a1 + 2.0), budget)?;
                Some((t.weighted / (s + a2), vec![t]))
            })
        }
    }
}

/// Evaluates the three-term negative-energy criterion. Inputs outside the
/// criterion's hypotheses give a not-applicable report.
pub fn check_triple_negative(lambda: [f64; 3], alpha: [f64; 3], obs: &Observables) -> CriterionReport {
    let [l1, l2, l3] = lambda;
    let [a1, a2, a3] = alpha;
    let case = classify_triple(l1, l2, a1, a2);
    let id = CriterionId::TripleNegative(case);
    if !lambda.iter().chain(alpha.iter()).all(|v| v.is_finite()) {
        return CriterionReport::not_applicable(id, "non-finite parameters");
    }
    if !(l3 < 0.0) {
        return CriterionReport::not_applicable(id, "λ₃ must be negative (focusing top term)");
    }
    if !(a3 > 4.0) {
        return CriterionReport::not_applicable(id, "α₃ must exceed the critical power 4");
    }
    if !(0.0 < a1 && a1 < a2 && a2 < a3) {
        return CriterionReport::not_applicable(id, "need 0 < α₁ < α₂ < α₃");
    }
    if !(obs.mass > 0.0) {
        return CriterionReport::not_applicable(id, "zero mass");
    }
    let mut notes = String::new();
    let Some(t) = threshold(case, lambda, alpha, &mut notes) else {
        return CriterionReport::not_applicable(id, "no admissible interpolation budget");
    };
    let params = CriterionParameters {
        theta: t.theta,
        delta_k: t.terms.iter().map(|x| x.delta).collect(),
        c_k: t.terms.iter().map(|x| x.c).collect(),
        ..Default::default()
    };
    CriterionReport::energy_threshold(id, obs.energy, obs.mass, t.value, params, notes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(mass: f64, energy: f64) -> Observables {
        Observables { mass, energy, ..Observables::zero() }
    }

    #[test]
    fn classification() {
        assert_eq!(classify_triple(1.0, 1.0, 1.0, 2.0), TripleCase::C1);
        assert_eq!(classify_triple(-1.0, -1.0, 4.5, 5.0), TripleCase::C2A);
        assert_eq!(classify_triple(-1.0, -1.0, 1.0, 5.0), TripleCase::C2B);
        assert_eq!(classify_triple(-1.0, -1.0, 1.0, 4.0), TripleCase::C2C);
        assert_eq!(classify_triple(1.0, -1.0, 5.0, 6.0), TripleCase::C3A);
        assert_eq!(classify_triple(1.0, -1.0, 2.0, 6.0), TripleCase::C3B);
        assert_eq!(classify_triple(1.0, -1.0, 2.0, 3.0), TripleCase::C3C);
        assert_eq!(classify_triple(-1.0, 1.0, 5.0, 6.0), TripleCase::C4A);
        assert_eq!(classify_triple(-1.0, 1.0, 2.0, 6.0), TripleCase::C4B);
        assert_eq!(classify_triple(-1.0, 1.0, 2.0, 3.0), TripleCase::C4C);
        assert_eq!(classify_triple(0.0, 0.0, 2.0, 3.0), TripleCase::C1);
    }

    #[test]
    fn case_one_is_negative_energy() {
        let r = check_triple_negative([1.0, 1.0, -1.0], [1.0, 2.0, 6.0], &obs(1.0, -0.1));
        assert!(r.satisfied);
        assert!((r.margin - 0.1).abs() < 1e-15);
        let r = check_triple_negative([1.0, 1.0, -1.0], [1.0, 2.0, 6.0], &obs(1.0, 0.0));
        assert!(r.applicable && !r.satisfied);
    }

    #[test]
    fn case_2b_threshold() {
        let (l1, a) = (-1.0f64, [1.0, 5.0, 6.0]);
        let w = l1.abs() * (a[1] - a[0]) / (a[0] + 2.0);
        let budget = (a[2] - a[1]) / (a[2] + 2.0);
        let c = sharp_interp_constant(a[0] + 2.0, a[2] + 2.0, budget / w).unwrap().constant;
        let t = l1.abs() * c * (a[1] - a[0]) / (a[1] * (a[0] + 2.0));
        let r = check_triple_negative([l1, -1.0, -1.0], a, &obs(1.0, -t - 0.5));
        assert_eq!(r.criterion_id, CriterionId::TripleNegative(TripleCase::C2B));
        assert!(r.satisfied);
        assert!((r.margin - 0.5).abs() < 1e-12);
        assert!((r.parameters.threshold.unwrap() - t).abs() < 1e-12);
    }

    #[test]
    fn not_applicable_inputs() {
        let o = obs(1.0, -1.0);
        assert!(!check_triple_negative([1.0, 1.0, 1.0], [1.0, 2.0, 6.0], &o).applicable);
        assert!(!check_triple_negative([1.0, 1.0, -1.0], [1.0, 2.0, 4.0], &o).applicable);
        assert!(!check_triple_negative([1.0, 1.0, -1.0], [2.0, 1.0, 6.0], &o).applicable);
        assert!(!check_triple_negative([1.0, 1.0, -1.0], [1.0, 2.0, 6.0], &obs(0.0, -1.0)).applicable);
    }

    #[test]
    fn theta_rows_report_grid_minimum() {
        let o = obs(1.0, -1.0);
        for (l, a) in [
            ([-1.0, -0.5, -1.0], [1.0, 3.0, 6.0]),
            ([1.0, -0.5, -1.0], [1.0, 3.0, 6.0]),
            ([-1.0, 0.5, -1.0], [1.0, 3.0, 6.0]),
            ([-1.0, 0.5, -1.0], [1.0, 4.5, 6.0]),
        ] {
            let r = check_triple_negative(l, a, &o);
            let theta = r.parameters.theta.unwrap();
            let t = r.parameters.threshold.unwrap();
            assert!(t > 0.0 && t.is_finite());
            assert!(theta > 0.0 && theta < 1.0);
        }
    }

    #[test]
    fn case_4b_empty_interval_falls_back() {
        let r = check_triple_negative([-1.0, 0.5, -1.0], [1.0, 5.5, 6.0], &obs(1.0, -1e6));
        assert!(r.notes.contains("empty"));
        assert!(r.satisfied);
    }
}
