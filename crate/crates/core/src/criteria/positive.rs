//! Positive-energy criterion for `N = ε₁|u|^{p−1} + ε₂|u|^{q−1}` with
//! `ε₁ < 0 < ε₂`, `q > 5`.
//!
//! With `α = (q−5)/8` and `B = V^{α+1}` the virial inequality becomes
//! `B_tt ≤ −U'(B)`; blow-up follows when the particle energy
//! `ℰ = B_t²/2 + U(B)` sits below the barrier `U(B_max)` on the inner side,
//! or above it while moving inwards.

use crate::constants::sharp_cstar;
use crate::observables::Observables;

use super::{push_note, CriterionId, CriterionParameters, CriterionReport};

/// How the weighted interpolation constant enters the lower bound
/// `‖u‖_{p+1}^{p+1} ≥ M^{(3p+1)/4} / (K_DR V^{(p−1)/4})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DrConstant {
    /// `K_DR = C*^{(3p+1)/2}`, the sharp constant of this form.
    #[default]
    Sharp,
    /// `K_DR = C*`, the placement used in the printed statement.
    AsPrinted,
}

/// Both forms of the criterion at one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoublePositiveEval {
    pub alpha: f64,
    pub c_star: f64,
    pub dr_constant: f64,
    /// `H` for `p = 5`; 1 otherwise.
    pub h: f64,
    pub v_max: f64,
    pub b_max: f64,
    pub u_max: f64,
    pub particle_energy: f64,
    /// Verdict of the explicit pairs (ℰ vs `U(B_max)`, `V` vs `V_max`, sign of `V_t`).
    pub explicit: bool,
    /// `X = V/V_max`.
    pub x: f64,
    /// Normalised rate on the left of the g-form.
    pub lhs: f64,
    /// `g(X)` scaled to the same units as `lhs`; `None` when the radicand is negative.
    pub rhs: Option<f64>,
    pub radicand: f64,
}

impl DoublePositiveEval {
    pub fn g_form(&self) -> Option<bool> {
        self.rhs.map(|r| self.lhs < r)
    }
}

/// Radicand of the `p ≠ 5` wrapper `f(X) = ±2√(·)`.
pub fn general_radicand(p: f64, q: f64, x: f64) -> f64 {
    let alpha = (q - 5.0) / 8.0;
    1.0 / ((2.0 * alpha + 1.0) * x.powf(2.0 * alpha)) + (q - p) * x / ((2.0 * alpha + 1.0) * (p - 1.0))
        - 4.0 * x.powf((5.0 - p) / 4.0) / (p - 1.0)
}

/// Radicand of the `p = 5` wrapper with the constant fixed by `f(1) = 0`.
pub fn p5_radicand(q: f64, x: f64) -> f64 {
    let alpha = (q - 5.0) / 8.0;
    1.0 / (4.0 * alpha * x.powf(2.0 * alpha)) + 0.5 * x - (2.0 * alpha + 1.0) / (4.0 * alpha)
}

/// Evaluates the criterion from the conserved quantities and `(V, V_t)`.
/// Hypotheses (`ε₁ < 0`, `1 < p < q`, `q > 5`, `M, E, V > 0`) are the caller's.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_double_positive(
    eps1: f64,
    p: f64,
    q: f64,
    mass: f64,
    energy: f64,
    variance: f64,
    rate: f64,
    dr: DrConstant,
) -> crate::Result<DoublePositiveEval> {
    let c_star = sharp_cstar(p)?;
    let dr_constant = match dr {
        DrConstant::Sharp => c_star.powf(0.5 * (3.0 * p + 1.0)),
        DrConstant::AsPrinted => c_star,
    };
    let alpha = (q - 5.0) / 8.0;
    let a1 = alpha + 1.0;
    let e1 = eps1.abs();
    let k = mass.powf(0.25 * (3.0 * p + 1.0)) / dr_constant;
    let (v, vt) = (variance, rate);

    if p == 5.0 {
        let h = 1.0 + 4.0 * e1 * k / (3.0 * mass * mass);
        let m2h = mass * mass * h;
        let v_max = alpha * m2h / ((q - 1.0) * energy);
        let u_max = a1 * a1 * v_max.powf(2.0 * alpha) * m2h * 2.0 / (2.0 * alpha + 1.0);
        let particle_energy = a1
            * a1
            * v.powf(2.0 * alpha)
            * (0.5 * vt * vt - 4.0 * (q - 1.0) * energy * v / (2.0 * alpha + 1.0) + 2.0 * m2h);
        let explicit = (particle_energy < u_max && v < v_max) || (particle_energy > u_max && vt < 0.0);
        let x = v / v_max;
        let radicand = p5_radicand(q, x);
        let lhs = vt / (4.0 * mass * h.sqrt());
        let rhs = (radicand >= 0.0).then(|| {
            let f = radicand.sqrt();
            (alpha / (2.0 * alpha + 1.0)).sqrt() * if x <= 1.0 { f } else { -f }
        });
        return Ok(DoublePositiveEval {
            alpha,
            c_star,
            dr_constant,
            h,
            v_max,
            b_max: v_max.powf(a1),
            u_max,
            particle_energy,
            explicit,
            x,
            lhs,
            rhs,
            radicand,
        });
    }

    let a = 16.0 * e1 * a1 * a1 * k / (p + 1.0);
    let c = 4.0 * a1 * a1 * (q - 1.0) * energy / (2.0 * alpha + 1.0);
    let y = e1 * (q - p) * k / ((p + 1.0) * (q - 1.0) * energy);
    let v_max = y.powf(4.0 / (p - 1.0));
    let u_max = c * v_max.powf(2.0 * alpha + 1.0) * (p - 1.0) / (q - p);
    let particle_energy = 0.5 * a1 * a1 * v.powf(2.0 * alpha) * vt * vt + a * v.powf(0.25 * (q - p))
        - c * v.powf(2.0 * alpha + 1.0);
    let explicit = (particle_energy < u_max && v < v_max) || (particle_energy > u_max && vt < 0.0);
    let x = v / v_max;
    let radicand = general_radicand(p, q, x);
    let scale = (2.0 * (q - 1.0) * (p - 1.0) * energy * v_max / (q - p)).sqrt();
    let rhs = (radicand >= 0.0).then(|| {
        let f = 2.0 * radicand.sqrt();
        if x <= 1.0 {
            f
        } else {
            -f
        }
    });
    Ok(DoublePositiveEval {
        alpha,
        c_star,
        dr_constant,
        h: 1.0,
        v_max,
        b_max: v_max.powf(a1),
        u_max,
        particle_energy,
        explicit,
        x,
        lhs: vt / scale,
        rhs,
        radicand,
    })
}

/// Positive-energy criterion with the sharp interpolation constant.
pub fn check_double_positive(
    eps1: f64,
    eps2: f64,
    p: f64,
    q: f64,
    obs: &Observables,
    real_data_shortcut: bool,
) -> CriterionReport {
    check_double_positive_with(eps1, eps2, p, q, obs, real_data_shortcut, DrConstant::Sharp)
}

pub fn check_double_positive_with(
    eps1: f64,
    eps2: f64,
    p: f64,
    q: f64,
    obs: &Observables,
    real_data_shortcut: bool,
    dr: DrConstant,
) -> CriterionReport {
    let id = if p == 5.0 { CriterionId::DoublePositiveP5 } else { CriterionId::DoublePositiveGeneral };
    if ![eps1, eps2, p, q].iter().all(|v| v.is_finite()) {
        return CriterionReport::not_applicable(id, "non-finite parameters");
    }
    if !(eps1 < 0.0 && eps2 > 0.0) {
        return CriterionReport::not_applicable(id, "need ε₁ < 0 < ε₂ (defocusing-focusing)");
    }
    if !(1.0 < p && p < q && q > 5.0) {
        return CriterionReport::not_applicable(id, "need 1 < p < q and q > 5");
    }
    if !(obs.energy > 0.0) {
        return CriterionReport::not_applicable(id, "E <= 0: negative-energy criteria apply instead");
    }
    if !(obs.variance > 0.0 && obs.mass > 0.0) {
        return CriterionReport::not_applicable(id, "need M > 0 and V > 0");
    }
    let ev =
        match evaluate_double_positive(eps1, p, q, obs.mass, obs.energy, obs.variance, obs.variance_rate, dr)
        {
            Ok(ev) => ev,
            Err(e) => return CriterionReport::not_applicable(id, e.to_string()),
        };

    let mut notes = String::new();
    if dr == DrConstant::AsPrinted {
        push_note(&mut notes, "interpolation constant placed as printed (C* to the first power)");
    }
    let satisfied = ev.explicit;
    let mut margin = match ev.rhs {
        Some(r) => r - ev.lhs,
        None => {
            push_note(&mut notes, "g-form radicand negative; verdict from the explicit conditions");
            if satisfied {
                1.0
            } else {
                -1.0
            }
        }
    };
    if ev.g_form().is_some_and(|g| g != satisfied) || (margin > 0.0) != satisfied {
        push_note(&mut notes, "state on the criterion boundary; explicit verdict used");
        margin = if satisfied { f64::MIN_POSITIVE } else { -f64::MIN_POSITIVE };
    }

    let mut params = CriterionParameters {
        c_star: Some(ev.c_star),
        b_max: Some(ev.b_max),
        u_b_max: Some(ev.u_max),
        ..Default::default()
    };
    let extra = &mut params.extra;
    extra.insert("alpha".into(), ev.alpha);
    extra.insert("H".into(), ev.h);
    extra.insert("V_max".into(), ev.v_max);
    extra.insert("particle_energy".into(), ev.particle_energy);
    extra.insert("X".into(), ev.x);
    extra.insert("radicand".into(), ev.radicand);
    extra.insert("dr_constant".into(), ev.dr_constant);
    if real_data_shortcut {
        if obs.variance_rate == 0.0 {
            extra.insert("shortcut_bound".into(), ev.v_max);
            extra.insert("shortcut_holds".into(), f64::from(u8::from(obs.variance < ev.v_max)));
        } else {
            push_note(&mut notes, "real-data shortcut skipped: V_t != 0");
        }
    }
    CriterionReport { criterion_id: id, applicable: true, satisfied, margin, parameters: params, notes }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(mass: f64, energy: f64, variance: f64, rate: f64) -> Observables {
        Observables { mass, energy, variance, variance_rate: rate, ..Observables::zero() }
    }

    #[test]
    fn h_tends_to_one() {
        let ev = evaluate_double_positive(-1e-300, 5.0, 7.0, 1.0, 1.0, 1.0, 0.0, DrConstant::Sharp).unwrap();
        assert!((ev.h - 1.0).abs() < 1e-15);
        let ev = evaluate_double_positive(-1.0, 5.0, 7.0, 1.0, 1.0, 1.0, 0.0, DrConstant::AsPrinted).unwrap();
        assert!((ev.h - (1.0 + 4.0 / (3.0 * ev.c_star))).abs() < 1e-14);
    }

    #[test]
    fn radicands_vanish_at_one() {
        for q in [5.5, 7.0, 9.0, 13.0] {
            assert!(p5_radicand(q, 1.0).abs() < 1e-12);
            for p in [1.5, 2.0, 3.0, 4.0, 6.0] {
                if p < q {
                    assert!(general_radicand(p, q, 1.0).abs() < 1e-12, "p={p} q={q}");
                }
            }
        }
    }

    #[test]
    fn explicit_and_wrapper_agree_on_samples() {
        for &(p, vt) in &[(5.0, -3.0), (5.0, 0.5), (3.0, -1.0), (3.0, 2.0), (7.0, -0.2)] {
            for v in [0.01, 0.1, 1.0, 10.0] {
                let ev = evaluate_double_positive(-0.7, p, 9.0, 1.3, 0.4, v, vt, DrConstant::Sharp).unwrap();
                if let Some(g) = ev.g_form() {
                    assert_eq!(g, ev.explicit, "p={p} v={v} vt={vt}");
                }
            }
        }
    }

    #[test]
    fn preconditions() {
        let o = obs(1.0, -1.0, 1.0, 0.0);
        let r = check_double_positive(-1.0, 1.0, 5.0, 7.0, &o, false);
        assert!(!r.applicable && r.notes.contains("negative-energy"));
        let o = obs(1.0, 1.0, 1.0, 0.0);
        assert!(!check_double_positive(1.0, 1.0, 5.0, 7.0, &o, false).applicable);
        assert!(!check_double_positive(-1.0, 1.0, 5.0, 5.0, &o, false).applicable);
    }

    #[test]
    fn shortcut_matches_vmax() {
        let o = obs(2.0, 0.5, 0.3, 0.0);
        let r = check_double_positive(-1.0, 1.0, 5.0, 7.0, &o, true);
        let bound = r.parameters.extra["shortcut_bound"];
        let h = r.parameters.extra["H"];
        assert!((bound - 2.0 * 4.0 * h / (8.0 * 0.5 * 6.0)).abs() < 1e-12);
        assert_eq!(r.parameters.extra["shortcut_holds"] == 1.0, 0.3 < bound);
        assert_eq!(r.satisfied, 0.3 < bound);
    }
}
