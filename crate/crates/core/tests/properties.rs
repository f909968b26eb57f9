use std::f64::consts::PI;

use nls_blowup::constants::{exponential_kappa, sharp_interp_constant, KappaVariant};
use nls_blowup::criteria::check_triple_negative;
use nls_blowup::field::{lp_norm, sample_profile};
use nls_blowup::observables::{compute_observables, dr_gap, uncertainty_gap};
use nls_blowup::profiles::{closed_form_condition, ClosedForm, DEFAULT_SERIES_TERMS};
use nls_blowup::solver::step;
use nls_blowup::{FieldProfile, Grid, Nonlinearity};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::new(20.0, 1024).unwrap()
}

fn bump(amp: f64, center: f64, width: f64, chirp: f64) -> FieldProfile {
    sample_profile(
        |x| {
            let y = (x - center) / width;
            Complex64::from_polar(amp * (-y * y / 2.0).exp(), chirp * x * x)
        },
        grid(),
    )
    .unwrap()
}

fn terms() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0..2.0f64, 0.1..3.0f64), 1..4).prop_map(|v| {
        let mut beta = 0.4;
        v.into_iter()
            .map(|(c, gap)| {
                beta += gap;
                (c, beta)
            })
            .collect()
    })
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn potential_derivative_is_s_times_n(pairs in terms(), s in 0.1..3.0f64) {
        let nl = Nonlinearity::from_pairs(&pairs).unwrap();
        let h = 1e-5;
        let d = (nl.potential_density(s + h).unwrap() - nl.potential_density(s - h).unwrap()) / (2.0 * h);
        prop_assert!(rel_close(d, s * nl.eval(s).unwrap(), 1e-6));
    }

    #[test]
    fn virial_weight_identity(pairs in terms(), s in 0.0..3.0f64) {
        let nl = Nonlinearity::from_pairs(&pairs).unwrap();
        let w = s * s * nl.eval(s).unwrap() - 2.0 * nl.potential_density(s).unwrap();
        prop_assert!(rel_close(nl.virial_weight_density(s).unwrap(), w, 1e-12));
    }

    #[test]
    fn exponential_matches_series(s in 0.0..4.0f64) {
        let nl = Nonlinearity::exponential(64).unwrap();
        let series = nl.truncated();
        prop_assert!(rel_close(nl.eval(s).unwrap(), s.exp(), 1e-13));
        prop_assert!(rel_close(nl.eval(s).unwrap(), series.eval(s).unwrap(), 1e-12));
        prop_assert!(rel_close(nl.potential_density(s).unwrap(), (s - 1.0) * s.exp() + 1.0, 1e-12));
        prop_assert!(rel_close(nl.potential_density(s).unwrap(), series.potential_density(s).unwrap(), 1e-12));
    }

    #[test]
    fn phase_and_chirp_preserve_mass_and_variance(
        amp in 0.2..2.0f64, c in -3.0..3.0f64, w in 0.6..2.0f64, phase in 0.0..(2.0 * PI), b in -2.0..2.0f64,
    ) {
        let nl = Nonlinearity::empty();
        let u = bump(amp, c, w, 0.0);
        let o = compute_observables(&u, &nl).unwrap();
        let rotated = compute_observables(&u.scaled(Complex64::from_polar(1.0, phase)), &nl).unwrap();
        let chirped = compute_observables(&bump(amp, c, w, b / 4.0), &nl).unwrap();
        for other in [&rotated, &chirped] {
            prop_assert!(rel_close(other.mass, o.mass, 1e-12));
            prop_assert!(rel_close(other.variance, o.variance, 1e-12));
        }
        prop_assert!(rel_close(rotated.variance_rate, o.variance_rate, 1e-10));
    }

    #[test]
    fn chirp_shifts_variance_rate(amp in 0.2..2.0f64, c in -3.0..3.0f64, w in 0.6..1.5f64, b in -1.0..1.0f64) {
        let nl = Nonlinearity::empty();
        let v0 = compute_observables(&bump(amp, c, w, 0.0), &nl).unwrap();
        let u0 = compute_observables(&bump(amp, c, w, b / 4.0), &nl).unwrap();
        let want = v0.variance_rate + 2.0 * b * v0.variance;
        prop_assert!((u0.variance_rate - want).abs() <= 1e-8 * (1.0 + v0.variance), "{} vs {}", u0.variance_rate, want);
    }

    #[test]
    fn one_step_conserves_mass(amp in 0.2..2.0f64, chirp in -0.5..0.5f64, pairs in terms(), dt in 1e-4..1e-2f64) {
        let nl = Nonlinearity::from_pairs(&pairs).unwrap();
        let u = bump(amp, 0.0, 1.0, chirp);
        let v = step(&u, &nl, dt).unwrap();
        let (m0, m1) = (lp_norm(&u, 2.0).unwrap(), lp_norm(&v, 2.0).unwrap());
        prop_assert!(((m1 - m0) / m0).abs() <= 1e-12);
    }

    #[test]
    fn dr_gap_is_degree_one(amp in 0.2..2.0f64, chirp in -0.5..0.5f64, lambda in 0.1..10.0f64, p in 1.5..9.0f64) {
        let u = bump(amp, 0.5, 1.0, chirp);
        let g = dr_gap(&u, p).unwrap();
        let gl = dr_gap(&u.scaled(Complex64::new(lambda, 0.0)), p).unwrap();
        prop_assert!((gl - lambda * g).abs() <= 1e-10 * (1.0 + lambda * g.abs()));
    }

    #[test]
    fn uncertainty_gap_nonnegative(amp in 0.2..2.0f64, c in -3.0..3.0f64, w in 0.6..2.0f64, chirp in -1.0..1.0f64) {
        let u = bump(amp, c, w, chirp);
        let o = compute_observables(&u, &Nonlinearity::empty()).unwrap();
        prop_assert!(uncertainty_gap(&u).unwrap() >= -1e-10 * o.grad_norm_sq);
    }

    #[test]
    fn interpolation_constant_decreases_in_delta(p in 2.1..8.0f64, gap in 0.2..6.0f64, d in 0.01..10.0f64, f in 1.01..10.0f64) {
        let q = p + gap;
        let lo = sharp_interp_constant(p, q, d).unwrap().constant;
        let hi = sharp_interp_constant(p, q, d * f).unwrap().constant;
        prop_assert!(hi < lo);
    }

    #[test]
    fn triple_margin_tracks_energy(shift in -5.0..5.0f64, amp in 0.5..1.5f64) {
        let nl = Nonlinearity::from_pairs(&[(-0.1, 2.0), (-0.1, 3.0), (1.0, 6.0)]).unwrap();
        let o = compute_observables(&bump(amp, 0.0, 1.0, 0.0), &nl).unwrap();
        let mut shifted = o.clone();
        shifted.energy -= shift;
        let a = check_triple_negative([0.1, 0.1, -1.0], [2.0, 3.0, 6.0], &o);
        let b = check_triple_negative([0.1, 0.1, -1.0], [2.0, 3.0, 6.0], &shifted);
        prop_assert!(((b.margin - a.margin) - shift).abs() <= 1e-12 * (1.0 + a.margin.abs()));
        prop_assert_eq!(b.satisfied, b.margin > 0.0);
    }

    #[test]
    fn subcondition2_margin_decreases_in_theta(a in 0.0..10.0f64, t in 0.0..10.0f64, dt in 0.01..5.0f64) {
        let m = |theta| {
            closed_form_condition(ClosedForm::SubCondition2Exp, theta, a, DEFAULT_SERIES_TERMS)
                .unwrap()
                .printed
                .margin()
        };
        prop_assert!(m(t + dt) < m(t));
    }
}

#[test]
fn optimal_kappa_not_above_main() {
    let main = exponential_kappa(KappaVariant::MainProof).unwrap().kappa;
    let opt = exponential_kappa(KappaVariant::MainProofOptimal).unwrap().kappa;
    assert!(opt <= main * (1.0 + 1e-12), "{opt} > {main}");
}
