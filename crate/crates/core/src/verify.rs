//! Built-in oracle suites run by `nls-blowup verify`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::constants::{
    brute_force_sup, exponential_kappa, sharp_cstar, sharp_interp_constant, KappaVariant,
};
use crate::field::{sample_profile, Grid};
use crate::nonlinearity::Nonlinearity;
use crate::observables::{compute_observables_with, uncertainty_gap, QuadratureOptions};
use crate::profiles::{closed_form_condition, ClosedForm, DEFAULT_SERIES_TERMS};
use crate::solver::{analyze_trace, evolve, SolverConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, suite: &'static str, name: impl Into<String>, passed: bool, detail: String) {
        self.checks.push(CheckResult { suite, name: name.into(), passed, detail });
    }

    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                format!("{tag} [{}] {}: {}", c.suite, c.name, c.detail)
            })
            .collect()
    }
}

/// Suite names accepted by [`run_suite`].
pub const SUITES: [&str; 4] = ["sharpness", "inequalities", "virial", "closed-form"];

pub fn run_all() -> VerifyReport {
    let mut r = VerifyReport::default();
    for s in SUITES {
        run_suite(s, &mut r);
    }
    r
}

/// Appends the checks of one suite; unknown names add a failing entry.
pub fn run_suite(name: &str, r: &mut VerifyReport) {
    match name {
        "sharpness" => sharpness(r),
        "inequalities" => inequalities(r),
        "virial" => virial(r),
        "closed-form" => closed_form(r),
        other => r.push("verify", other.to_string(), false, "unknown suite".into()),
    }
}

fn sharpness(r: &mut VerifyReport) {
    const S: &str = "sharpness";
    match sharp_cstar(5.0) {
        Ok(c) => {
            let want = (4.0 * PI * PI / 3.0).powf(0.125);
            r.push(S, "C*(5)", (c - want).abs() < 1e-12, format!("{c:.15} vs {want:.15}"));
        }
        Err(e) => r.push(S, "C*(5)", false, e.to_string()),
    }
    match exponential_kappa(KappaVariant::MainProof) {
        Ok(k) => {
            let ok = (k.kappa - 4.136425).abs() < 5e-3 && (k.inner_sum - 14.54570).abs() < 5e-3;
            r.push(S, "kappa", ok, format!("kappa = {:.6}, inner sum = {:.5}", k.kappa, k.inner_sum));
        }
        Err(e) => r.push(S, "kappa", false, e.to_string()),
    }
    for &(p, q, delta) in &[(2.5, 6.0, 0.3), (3.0, 8.0, 1e-3), (4.0, 5.0, 10.0)] {
        let name = format!("C(p={p}, q={q}, delta={delta})");
        match sharp_interp_constant(p, q, delta) {
            Ok(b) => {
                let a_star = ((p - 2.0) / (delta * (q - 2.0))).powf(1.0 / (q - p));
                let sup = brute_force_sup(p, q, delta, a_star.max(1e-12), 4001);
                let ok = sup <= b.constant * (1.0 + 1e-9) && sup >= b.constant * 0.99;
                r.push(S, name, ok, format!("C = {:.9}, brute-force sup = {sup:.9}", b.constant));
            }
            Err(e) => r.push(S, name, false, e.to_string()),
        }
    }
}

fn inequalities(r: &mut VerifyReport) {
    const S: &str = "inequalities";
    let grid = Grid { half_width: 20.0, num_points: 2048 };
    let Ok(g) = sample_profile(|x| Complex64::new((-x * x / 2.0).exp(), 0.0), grid) else {
        return r.push(S, "gaussian", false, "profile construction failed".into());
    };
    match uncertainty_gap(&g) {
        Ok(gap) => r.push(S, "gaussian saturates uncertainty", gap.abs() < 1e-8, format!("gap = {gap:.3e}")),
        Err(e) => r.push(S, "gaussian saturates uncertainty", false, e.to_string()),
    }
    let Ok(c) = sample_profile(|x| Complex64::from_polar((-x * x / 2.0).exp(), 0.7 * x * x), grid) else {
        return;
    };
    match uncertainty_gap(&c) {
        Ok(gap) => {
            r.push(S, "chirped gaussian saturates uncertainty", gap.abs() < 1e-8, format!("gap = {gap:.3e}"))
        }
        Err(e) => r.push(S, "chirped gaussian saturates uncertainty", false, e.to_string()),
    }
}

fn virial(r: &mut VerifyReport) {
    const S: &str = "virial";
    let grid = Grid { half_width: 40.0, num_points: 2048 };
    let nl = Nonlinearity::empty();
    let Ok(u) = sample_profile(|x| Complex64::new((-x * x / 2.0).exp(), 0.0), grid) else {
        return r.push(S, "free gaussian", false, "profile construction failed".into());
    };
    let cfg = SolverConfig { dt: 1e-3, t_end: 1.0, cadence: 10, ..Default::default() };
    let res = evolve(&u, &nl, &cfg).and_then(|tr| {
        let o = compute_observables_with(&u, &nl, QuadratureOptions { far_field_tail: false }, None)?;
        let a = analyze_trace(&tr, &o, &nl)?;
        let err = tr
            .times
            .iter()
            .zip(&tr.variance)
            .map(|(t, v)| (v - (PI.sqrt() / 2.0 + 2.0 * PI.sqrt() * t * t)).abs())
            .fold(0.0f64, f64::max);
        Ok((a, err))
    });
    match res {
        Ok((a, err)) => {
            r.push(S, "free variance law", err < 1e-6, format!("max |V - V_exact| = {err:.3e}"));
            r.push(S, "free virial mismatch", a.virial_mismatch < 1e-4, format!("{:.3e}", a.virial_mismatch));
            r.push(S, "free mass drift", a.mass_drift < 1e-10, format!("{:.3e}", a.mass_drift));
        }
        Err(e) => r.push(S, "free gaussian", false, e.to_string()),
    }
    let nl = Nonlinearity::from_pairs(&[(1.0, 2.0)]).unwrap_or_else(|_| Nonlinearity::empty());
    let cfg = SolverConfig { dt: 1e-3, t_end: 1.0, cadence: 10, ..Default::default() };
    let res = evolve(&u, &nl, &cfg).and_then(|tr| {
        let o = compute_observables_with(&u, &nl, QuadratureOptions { far_field_tail: false }, None)?;
        analyze_trace(&tr, &o, &nl)
    });
    match res {
        Ok(a) => r.push(
            S,
            "cubic virial mismatch",
            a.virial_mismatch < 1e-3 && a.mass_drift < 1e-10,
            format!("mismatch {:.3e}, mass drift {:.3e}", a.virial_mismatch, a.mass_drift),
        ),
        Err(e) => r.push(S, "cubic run", false, e.to_string()),
    }
}

fn closed_form(r: &mut VerifyReport) {
    const S: &str = "closed-form";
    match closed_form_condition(ClosedForm::SubCondition2Exp, 0.0, 1.0, DEFAULT_SERIES_TERMS) {
        Ok(c) => r.push(
            S,
            "SubCondition2_exp at (0, 1)",
            c.printed.holds && (c.printed.rhs - 1.2536).abs() < 1e-3,
            format!("lhs = {}, rhs = {:.6}", c.printed.lhs, c.printed.rhs),
        ),
        Err(e) => r.push(S, "SubCondition2_exp at (0, 1)", false, e.to_string()),
    }
    // Printed and direct forms of the polynomial-decay criterion part ways as A → 0⁺.
    for a in [1e-1, 1e-2, 1e-3] {
        let name = format!("Poly printed vs direct at A = {a:e}");
        match closed_form_condition(ClosedForm::Poly, 0.0, a, DEFAULT_SERIES_TERMS) {
            Ok(c) => {
                let ratio = c.direct.rhs / c.direct.lhs;
                r.push(
                    S,
                    name,
                    c.printed.holds && !c.direct.holds,
                    format!(
                        "printed: 1 < {:.6e} holds = {}; direct: V = {:.6e} < V_max = {:.6e} holds = {} (V_max/V = {ratio:.6}); verdicts disagree",
                        c.printed.rhs, c.printed.holds, c.direct.lhs, c.direct.rhs, c.direct.holds
                    ),
                );
            }
            Err(e) => r.push(S, name, false, e.to_string()),
        }
    }
}
