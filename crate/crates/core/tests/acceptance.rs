//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nls_blowup::constants::{exponential_kappa, sharp_cstar, sharp_interp_constant, KappaVariant};
use nls_blowup::criteria::{
    check_exponential_negative, check_triple_negative, evaluate_double_positive, general_radicand,
    p5_radicand, DrConstant,
};
use nls_blowup::field::sample_profile;
use nls_blowup::observables::{
    compute_observables, compute_observables_with, dr_gap, uncertainty_gap, QuadratureOptions,
};
use nls_blowup::profiles::{
    build_profile, closed_form_condition, scan_region, Axis, ClosedForm, ProfileFamily, ScanView,
    DEFAULT_SERIES_TERMS, THREADS_ENV,
};
use nls_blowup::solver::{analyze_trace, evolve, SimulationTrace, SolverConfig, StopReason};
use nls_blowup::verify::{run_suite, VerifyReport};
use nls_blowup::{FieldProfile, Grid, Nonlinearity, Observables};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RAW: QuadratureOptions = QuadratureOptions { far_field_tail: false };

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Criterion = (&'static str, f64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("constant reproduction", 1.0, a1_constants),
        ("interpolation sharpness", 5.0, a2_interpolation),
        ("inequality suite", 10.0, a3_inequalities),
        ("closed-form observables", 10.0, a4_polynomial),
        ("parameter-region regressions", 30.0, a5_regions),
        ("positive-energy consistency", 10.0, a6_positive_energy),
        ("printed vs direct discrepancy", 5.0, a7_discrepancy),
        ("solver conservation and virial", 60.0, a8_solver),
        ("criterion-to-dynamics", 120.0, a9_dynamics),
        ("exponential-nonlinearity run", 120.0, a10_exponential),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let tag = format!("acceptance {:>2}", i + 1);
        if !filter.is_empty()
            && !filter.iter().any(|s| name.contains(s.as_str()) || tag.ends_with(s.as_str()))
        {
            continue;
        }
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs_f64(*budget);
        let pass = out.pass && in_time;
        failed += usize::from(!pass);
        println!(
            "{tag} {} {name}: {} [{:.2}s / {budget}s budget{}]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over budget" }
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}

fn a1_constants() -> Outcome {
    let c5 = sharp_cstar(5.0).unwrap();
    let want = (4.0 * PI * PI / 3.0).powf(0.125);
    let k = exponential_kappa(KappaVariant::MainProof).unwrap();
    let pass = (c5 - want).abs() <= 1e-12
        && (k.kappa - 4.136425).abs() < 5e-3
        && (k.inner_sum - 14.54570).abs() < 5e-3;
    outcome(
        pass,
        format!(
            "C*(5) = {c5:.15} (|diff| {:.1e}), kappa = {:.6}, inner sum = {:.5}",
            (c5 - want).abs(),
            k.kappa,
            k.inner_sum
        ),
    )
}

fn a2_interpolation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grid: Vec<f64> = (0..=24_000).map(|i| 10f64.powf(-6.0 + 12.0 * i as f64 / 24_000.0)).collect();
    let mut bad = Vec::new();
    for _ in 0..50 {
        let p = rng.gen_range(2.2..8.0);
        let q = p + rng.gen_range(0.5..6.0);
        let delta = 10f64.powf(rng.gen_range(-2.0..2.0));
        let c = sharp_interp_constant(p, q, delta).unwrap().constant;
        // a^p ≤ C a² + δ a^q, divided by a².
        let holds = |c: f64| grid.iter().all(|&a| a.powf(p - 2.0) <= c + delta * a.powf(q - 2.0) + 1e-12 * c);
        if !holds(c) || holds(0.99 * c) {
            bad.push(format!("(p={p:.3}, q={q:.3}, delta={delta:.3e})"));
        }
    }
    outcome(bad.is_empty(), format!("50 random (p, q, delta), {} failures {:?}", bad.len(), bad))
}

fn random_field(rng: &mut ChaCha8Rng, grid: Grid) -> FieldProfile {
    let bumps: Vec<(f64, f64, f64, f64, f64)> = (0..rng.gen_range(1..=3))
        .map(|_| {
            (
                rng.gen_range(0.2..3.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(0.5..2.5),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(0.0..2.0 * PI),
            )
        })
        .collect();
    sample_profile(
        |x| {
            bumps
                .iter()
                .map(|&(amp, c, w, chirp, phase)| {
                    let y = (x - c) / w;
                    Complex64::from_polar(amp * (-y * y / 2.0).exp(), chirp * (x - c) * (x - c) + phase)
                })
                .sum()
        },
        grid,
    )
    .unwrap()
}

fn a3_inequalities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid = Grid::new(30.0, 2048).unwrap();
    let (mut worst_u, mut worst_dr) = (f64::INFINITY, f64::INFINITY);
    let mut violations = 0;
    for _ in 0..200 {
        let u = random_field(&mut rng, grid);
        let o = compute_observables(&u, &Nonlinearity::empty()).unwrap();
        let gu = uncertainty_gap(&u).unwrap() / o.grad_norm_sq;
        let p = rng.gen_range(1.5..9.0);
        let gd = dr_gap(&u, p).unwrap() / o.mass.sqrt();
        worst_u = worst_u.min(gu);
        worst_dr = worst_dr.min(gd);
        violations += usize::from(gu < -1e-10) + usize::from(gd < -1e-10);
    }
    let g = sample_profile(|x| Complex64::new((-x * x / 2.0).exp(), 0.0), Grid::new(20.0, 2048).unwrap())
        .unwrap();
    let og = compute_observables(&g, &Nonlinearity::empty()).unwrap();
    let sat = uncertainty_gap(&g).unwrap().abs() / og.grad_norm_sq;
    outcome(
        violations == 0 && sat <= 1e-8,
        format!(
            "200 fields: min relative uncertainty gap {worst_u:.3e}, min relative DR gap {worst_dr:.3e}, {violations} violations; Gaussian saturation {sat:.1e}"
        ),
    )
}

fn a4_polynomial() -> Outcome {
    let fam = ProfileFamily::PolynomialDecay { a: 1.0 };
    let u = build_profile(&fam, Grid::new(200.0, 1 << 14).unwrap()).unwrap();
    let o = compute_observables(&u, &Nonlinearity::empty()).unwrap();
    let (dm, dv, dk) =
        ((o.mass - PI / 2.0).abs(), (o.variance - PI / 2.0).abs(), (o.kinetic - PI / 8.0).abs());
    outcome(
        dm < 1e-4 && dv < 1e-4 && dk < 1e-4,
        format!("|M - pi/2| = {dm:.1e}, |V - pi/2| = {dv:.1e}, |kinetic - pi/8| = {dk:.1e}"),
    )
}

fn a5_regions() -> Outcome {
    let theta10 = Axis::new("theta", 0.0, 10.0, 100).unwrap();
    let theta50 = Axis::new("theta", 0.0, 50.0, 100).unwrap();
    let amp = Axis::new("A", 0.0, 10.0, 100).unwrap();
    let run = |which, x: &Axis| scan_region(which, ScanView::Printed, x, Some(&amp)).unwrap();
    let s1 = run(ClosedForm::SubCondition2Exp, &theta10);
    let w1 = run(ClosedForm::WeightedExp, &theta50);
    std::env::set_var(THREADS_ENV, "1");
    let s2 = run(ClosedForm::SubCondition2Exp, &theta10);
    let w2 = run(ClosedForm::WeightedExp, &theta50);
    std::env::remove_var(THREADS_ENV);
    let mask = |s: &nls_blowup::profiles::ScanResult| {
        s.cells.iter().map(|c| (c.satisfied, c.margin.to_bits())).collect::<Vec<_>>()
    };
    let stable = mask(&s1) == mask(&s2) && mask(&w1) == mask(&w2) && s1.to_csv() == s2.to_csv();
    let point = closed_form_condition(ClosedForm::SubCondition2Exp, 1e-9, 1.0, DEFAULT_SERIES_TERMS).unwrap();
    // For each A the satisfied θ-set is an interval starting at the first cell.
    let intervals = (0..100).all(|j| {
        let row: Vec<bool> = (0..100).map(|i| s1.cell(i, j).satisfied).collect();
        let k = row.iter().take_while(|b| **b).count();
        row[k..].iter().all(|b| !b)
    });
    outcome(
        s1.satisfied_count() > 0 && w1.satisfied_count() > 0 && point.printed.holds && stable && intervals,
        format!(
            "SubCondition2_exp {} / 10000 cells, weighted {} / 10000 cells, (0+, 1): {:.4} > {}, masks stable = {stable}, theta-intervals = {intervals}",
            s1.satisfied_count(),
            w1.satisfied_count(),
            point.printed.rhs,
            point.printed.lhs
        ),
    )
}

fn a6_positive_energy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut compared, mut ties, mut mismatches) = (0usize, 0usize, 0usize);
    for _ in 0..10_000 {
        let p: f64 = if rng.gen_bool(0.3) { 5.0 } else { rng.gen_range(1.5..8.0) };
        let q = p.max(5.0) + rng.gen_range(0.2..6.0);
        let eps1 = -10f64.powf(rng.gen_range(-1.0..1.0));
        let mass = 10f64.powf(rng.gen_range(-1.0..1.0));
        let energy = 10f64.powf(rng.gen_range(-2.0..2.0));
        let probe = evaluate_double_positive(eps1, p, q, mass, energy, 1.0, 1.0, DrConstant::Sharp).unwrap();
        let v = probe.v_max * 10f64.powf(rng.gen_range(-1.0..1.0));
        let unit = evaluate_double_positive(eps1, p, q, mass, energy, v, 1.0, DrConstant::Sharp).unwrap();
        let rate = rng.gen_range(-3.0..3.0) / unit.lhs;
        let e = evaluate_double_positive(eps1, p, q, mass, energy, v, rate, DrConstant::Sharp).unwrap();
        let Some(g) = e.g_form() else { continue };
        if (e.particle_energy - e.u_max).abs() <= 1e-9 * e.u_max.abs() {
            ties += 1;
            continue;
        }
        compared += 1;
        mismatches += usize::from(g != e.explicit);
    }
    let mut worst = 0.0f64;
    for i in 0..40 {
        let p = 1.2 + 0.2 * i as f64;
        for j in 0..20 {
            let q = p.max(5.0) + 0.1 + 0.35 * j as f64;
            let r = if p == 5.0 { p5_radicand(q, 1.0) } else { general_radicand(p, q, 1.0) };
            worst = worst.max(r.abs());
        }
    }
    outcome(
        mismatches == 0 && compared > 1000 && worst <= 1e-12,
        format!(
            "{compared} tuples compared ({ties} near-ties excluded), {mismatches} mismatches; max |radicand(X=1)| = {worst:.1e}"
        ),
    )
}

fn a7_discrepancy() -> Outcome {
    let mut r = VerifyReport::default();
    run_suite("closed-form", &mut r);
    let poly: Vec<_> = r.checks.iter().filter(|c| c.name.starts_with("Poly")).collect();
    let pass = poly.len() == 3 && poly.iter().all(|c| c.passed);
    let first = poly.last().map(|c| c.detail.clone()).unwrap_or_default();
    outcome(pass, format!("{} A-values disagree as recorded; smallest A: {first}", poly.len()))
}

fn gaussian(grid: Grid, amp: f64) -> FieldProfile {
    sample_profile(|x| Complex64::new(amp * (-x * x / 2.0).exp(), 0.0), grid).unwrap()
}

fn energy_at(u: &FieldProfile, nl: &Nonlinearity, dt: f64, t_end: f64) -> f64 {
    let cfg = SolverConfig { dt, t_end, cadence: (t_end / dt).round() as usize, ..Default::default() };
    *evolve(u, nl, &cfg).unwrap().energy.last().unwrap()
}

fn a8_solver() -> Outcome {
    let cubic = Nonlinearity::from_pairs(&[(1.0, 2.0)]).unwrap();
    let grid = Grid::new(20.0, 512).unwrap();
    let u = gaussian(grid, 1.0);
    let o0 = compute_observables_with(&u, &cubic, RAW, None).unwrap();

    let long = SolverConfig { dt: 1e-3, t_end: 10.0, cadence: 100, ..Default::default() };
    let tr = evolve(&u, &cubic, &long).unwrap();
    let mass_drift = analyze_trace(&tr, &o0, &cubic).unwrap().mass_drift;
    let mass_ok = tr.steps >= 10_000 && mass_drift <= 1e-10;

    let d: Vec<f64> =
        [0.02, 0.01, 0.005].iter().map(|&dt| energy_at(&u, &cubic, dt, 1.0) - o0.energy).collect();
    let (r1, r2) = (d[0] / d[1], d[1] / d[2]);
    let order_ok = (3.5..=4.5).contains(&r1) && (3.5..=4.5).contains(&r2);

    let free = Nonlinearity::empty();
    let wide = Grid::new(40.0, 2048).unwrap();
    let cfg = SolverConfig { dt: 1e-3, t_end: 1.0, cadence: 10, ..Default::default() };
    let ft = evolve(&gaussian(wide, 1.0), &free, &cfg).unwrap();
    let var_err = ft
        .times
        .iter()
        .zip(&ft.variance)
        .map(|(t, v)| (v - (PI.sqrt() / 2.0 + 2.0 * PI.sqrt() * t * t)).abs())
        .fold(0.0f64, f64::max);

    let cfg = SolverConfig { dt: 1e-3, t_end: 2.0, cadence: 10, ..Default::default() };
    let mut virial = 0.0f64;
    // The defocusing run spreads, so it gets a box wide enough to avoid wrap-around by t = 2.
    let defocusing = Nonlinearity::from_pairs(&[(-1.0, 2.0)]).unwrap();
    for (nl, amp, g) in [(cubic.clone(), 1.0, grid), (defocusing, 1.5, wide), (free, 1.0, grid)] {
        let v = gaussian(g, amp);
        let tr = evolve(&v, &nl, &cfg).unwrap();
        let o = compute_observables_with(&v, &nl, RAW, None).unwrap();
        virial = virial.max(analyze_trace(&tr, &o, &nl).unwrap().virial_mismatch);
    }
    outcome(
        mass_ok && order_ok && var_err <= 1e-6 && virial <= 1e-3,
        format!(
            "mass drift {mass_drift:.1e} over {} steps, energy-drift ratios {r1:.3} / {r2:.3}, free V error {var_err:.1e}, virial mismatch {virial:.1e}",
            tr.steps
        ),
    )
}

fn triple_nl() -> Nonlinearity {
    Nonlinearity::from_pairs(&[(-0.1, 2.0), (-0.1, 3.0), (1.0, 6.0)]).unwrap()
}

fn run_chirped(
    nl: &Nonlinearity,
    b: f64,
    amp: f64,
    grid: Grid,
    dt: f64,
    t_end: f64,
) -> (Observables, SimulationTrace) {
    let fam = ProfileFamily::ChirpedGaussian { theta: 1.0, a: amp, b };
    let u = build_profile(&fam, grid).unwrap();
    let o = compute_observables_with(&u, nl, RAW, None).unwrap();
    let cfg = SolverConfig { dt, t_end, cadence: 10, ..Default::default() };
    (o, evolve(&u, nl, &cfg).unwrap())
}

fn a9_dynamics() -> Outcome {
    let nl = triple_nl();
    let fam = ProfileFamily::ChirpedGaussian { theta: 1.0, a: 1.4, b: -5.0 };
    let u = build_profile(&fam, Grid::new(8.0, 1 << 16).unwrap()).unwrap();
    let o = compute_observables(&u, &nl).unwrap();
    let report = check_triple_negative([0.1, 0.1, -1.0], [2.0, 3.0, 6.0], &o);
    let horizon = o.variance.sqrt() / o.y();

    let (o0, tr) = run_chirped(&nl, -5.0, 1.4, Grid::new(8.0, 1 << 16).unwrap(), 1e-4, horizon);
    let a = analyze_trace(&tr, &o0, &nl).unwrap();
    let (f0, ft) = run_chirped(&nl, 5.0, 1.4, Grid::new(64.0, 1 << 14).unwrap(), 1e-3, horizon);
    let fa = analyze_trace(&ft, &f0, &nl).unwrap();
    let pass = report.satisfied
        && tr.stop_reason == StopReason::BlowupIndicated
        && a.vtt_negative
        && ft.stop_reason == StopReason::Completed;
    outcome(
        pass,
        format!(
            "{} margin {:.3}; b=-5: {} at t = {:.4} (V_tt < 0 at all {} samples: {}); b=+5: {} at t = {:.3} (horizon {horizon:.3}, max grad growth {:.2}, mass drift {:.1e})",
            report.criterion_id,
            report.margin,
            tr.stop_reason,
            tr.times.last().unwrap(),
            tr.len(),
            a.vtt_negative,
            ft.stop_reason,
            ft.times.last().unwrap(),
            ft.grad_norm_sq.iter().fold(0.0f64, |m, g| m.max(*g)) / ft.grad_norm_sq[0],
            fa.mass_drift
        ),
    )
}

fn a10_exponential() -> Outcome {
    let nl = Nonlinearity::exponential(64).unwrap();
    let grid = Grid::new(8.0, 1 << 16).unwrap();
    let fam = ProfileFamily::ChirpedGaussian { theta: 1.0, a: 4.0, b: -4.4 };
    let u = build_profile(&fam, grid).unwrap();
    let report = check_exponential_negative(&compute_observables(&u, &nl).unwrap(), false);
    let (o0, tr) = run_chirped(&nl, -4.4, 4.0, grid, 1e-4, 1.0);
    let a = analyze_trace(&tr, &o0, &nl).unwrap();
    let halted = tr.stop_reason != StopReason::Completed;
    let pass = report.satisfied && a.mass_drift <= 1e-10 && a.rate_decreasing && halted;
    outcome(
        pass,
        format!(
            "E + kappa M margin {:.2}; {} at t = {:.4} after {} steps, mass drift {:.1e}, V_t strictly decreasing over {} samples: {}",
            report.margin,
            tr.stop_reason,
            tr.times.last().unwrap(),
            tr.steps,
            a.mass_drift,
            tr.len(),
            a.rate_decreasing
        ),
    )
}
