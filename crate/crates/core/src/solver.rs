//! Strang split-step Fourier evolution with conservation and virial diagnostics.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::field::{FieldProfile, Grid, Spectral};
use crate::nonlinearity::Nonlinearity;
use crate::observables::{compute_observables_with, virial_rhs_with, Observables, QuadratureOptions};

const QUAD: QuadratureOptions = QuadratureOptions { far_field_tail: false };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Completed,
    BlowupIndicated,
    ResolutionExhausted,
    NumericalOverflow,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Steps of size `dt` between diagnostic samples.
    pub cadence: usize,
    /// Halt when `‖u_x‖²` exceeds this multiple of its initial value.
    pub blowup_growth: f64,
    /// Halt when the top tenth of wavenumbers carries more than this mass fraction.
    pub tail_mass_fraction: f64,
    /// Cap on the nonlinear phase rotation `max|N|·h` of one step.
    pub max_phase: f64,
    pub max_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            cadence: 10,
            blowup_growth: 1e6,
            tail_mass_fraction: 0.01,
            max_phase: 0.1,
            max_steps: 5_000_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return domain(format!("dt = {} must be positive", self.dt));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return domain(format!("t_end = {} must be positive", self.t_end));
        }
        if self.cadence == 0 || self.max_steps == 0 {
            return domain("cadence and max_steps must be positive");
        }
        if !(self.blowup_growth > 1.0 && self.tail_mass_fraction > 0.0 && self.max_phase > 0.0) {
            return domain("blowup_growth > 1, tail_mass_fraction > 0 and max_phase > 0 required");
        }
        Ok(())
    }
}

/// Spectral indicators read off the mid-step spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInfo {
    pub grad_norm_sq: f64,
    pub tail_fraction: f64,
}

/// Reusable transforms and propagator for one grid.
pub struct Stepper {
    grid: Grid,
    sp: Spectral,
    k2: Vec<f64>,
    tail: Vec<bool>,
    prop: Vec<Complex64>,
    prop_dt: f64,
}

impl Stepper {
    pub fn new(grid: Grid) -> Self {
        let sp = Spectral::new(&grid);
        let k = sp.wavenumbers().to_vec();
        let kmax = k.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let n = grid.num_points;
        let k2 = k.iter().enumerate().map(|(m, v)| if m == n / 2 { 0.0 } else { v * v }).collect();
        let tail = k.iter().map(|v| v.abs() > 0.9 * kmax).collect();
        Self { grid, sp, k2, tail, prop: Vec::new(), prop_dt: f64::NAN }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub(crate) fn spectral(&mut self) -> &mut Spectral {
        &mut self.sp
    }

    fn nonlinear_phase(u: &mut [Complex64], nl: &Nonlinearity, h: f64) {
        for z in u.iter_mut() {
            let n = nl.eval_unchecked(z.norm());
            *z *= Complex64::from_polar(1.0, n * h);
        }
    }

    /// One Strang step of size `h` in place.
    pub fn step_in_place(&mut self, u: &mut [Complex64], nl: &Nonlinearity, h: f64) -> StepInfo {
        Self::nonlinear_phase(u, nl, 0.5 * h);
        self.sp.forward(u);
        if self.prop_dt != h {
            self.prop = self.k2.iter().map(|k2| Complex64::from_polar(1.0, -k2 * h)).collect();
            self.prop_dt = h;
        }
        let (mut total, mut grad, mut tail) = (0.0, 0.0, 0.0);
        for (m, z) in u.iter_mut().enumerate() {
            let w = z.norm_sqr();
            total += w;
            grad += self.k2[m] * w;
            if self.tail[m] {
                tail += w;
            }
            *z *= self.prop[m];
        }
        self.sp.inverse(u);
        Self::nonlinear_phase(u, nl, 0.5 * h);
        let n = u.len() as f64;
        StepInfo {
            grad_norm_sq: grad * self.grid.dx() / n,
            tail_fraction: if total > 0.0 { tail / total } else { 0.0 },
        }
    }
}

fn max_abs(u: &[Complex64]) -> f64 {
    u.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

fn all_finite(u: &[Complex64]) -> bool {
    u.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// One Strang step: half nonlinear phase, exact linear step, half nonlinear phase.
pub fn step(field: &FieldProfile, nl: &Nonlinearity, dt: f64) -> Result<FieldProfile> {
    if !(dt > 0.0 && dt.is_finite()) {
        return domain(format!("dt = {dt} must be positive"));
    }
    nl.validate()?;
    let mut st = Stepper::new(*field.grid());
    let mut u = field.samples().to_vec();
    st.step_in_place(&mut u, nl, dt);
    if !all_finite(&u) {
        return Err(Error::Overflow(format!("non-finite field at t = {dt}")));
    }
    Ok(FieldProfile::from_raw(*field.grid(), u))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    pub variance: Vec<f64>,
    pub variance_rate: Vec<f64>,
    pub grad_norm_sq: Vec<f64>,
    /// `8‖u_x‖² − 4∫W` at each sample.
    pub virial_rhs: Vec<f64>,
    pub stop_reason: StopReason,
    pub blowup_time_estimate: Option<f64>,
    pub steps: usize,
    pub notes: String,
}

impl SimulationTrace {
    fn new() -> Self {
        Self {
            times: Vec::new(),
            mass: Vec::new(),
            energy: Vec::new(),
            variance: Vec::new(),
            variance_rate: Vec::new(),
            grad_norm_sq: Vec::new(),
            virial_rhs: Vec::new(),
            stop_reason: StopReason::Completed,
            blowup_time_estimate: None,
            steps: 0,
            notes: String::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn push(&mut self, t: f64, o: &Observables, rhs: f64) {
        self.times.push(t);
        self.mass.push(o.mass);
        self.energy.push(o.energy);
        self.variance.push(o.variance);
        self.variance_rate.push(o.variance_rate);
        self.grad_norm_sq.push(o.grad_norm_sq);
        self.virial_rhs.push(rhs);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,mass,energy,variance,variance_rate,grad_norm_sq\n");
        for i in 0..self.len() {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.times[i],
                self.mass[i],
                self.energy[i],
                self.variance[i],
                self.variance_rate[i],
                self.grad_norm_sq[i]
            ));
        }
        s
    }
}

/// Output of [`evolve_with_state`]: the trace and the last field.
pub struct Evolution {
    pub trace: SimulationTrace,
    pub field: FieldProfile,
}

/// Evolves `field` and samples observables every `cadence` steps of `dt`.
pub fn evolve(field: &FieldProfile, nl: &Nonlinearity, cfg: &SolverConfig) -> Result<SimulationTrace> {
    evolve_with_state(field, nl, cfg).map(|e| e.trace)
}

pub fn evolve_with_state(field: &FieldProfile, nl: &Nonlinearity, cfg: &SolverConfig) -> Result<Evolution> {
    cfg.validate()?;
    nl.validate()?;
    let grid = *field.grid();
    let mut st = Stepper::new(grid);
    let mut u = field.samples().to_vec();
    let mut trace = SimulationTrace::new();

    let sample =
        |st: &mut Stepper, u: &[Complex64], t: f64, trace: &mut SimulationTrace| -> Result<Observables> {
            let f = FieldProfile::from_raw(grid, u.to_vec());
            let o = compute_observables_with(&f, nl, QUAD, Some(st.spectral()))?;
            let rhs = virial_rhs_with(&f, nl, Some(st.spectral()))?;
            trace.push(t, &o, rhs);
            Ok(o)
        };
    let o0 = sample(&mut st, &u, 0.0, &mut trace)?;
    let g0 = o0.grad_norm_sq;

    let interval = cfg.dt * cfg.cadence as f64;
    let n_samples = (cfg.t_end / interval - 1e-9).ceil().max(1.0) as usize;
    let mut t = 0.0;
    'outer: for j in 1..=n_samples {
        let target = if j == n_samples { cfg.t_end } else { j as f64 * interval };
        let mut remaining = target - t;
        loop {
            let nmax = nl.eval_unchecked(max_abs(&u)).abs();
            let h_max = if nmax > 0.0 { cfg.dt.min(cfg.max_phase / nmax) } else { cfg.dt };
            let nrem = (remaining / h_max - 1e-9).ceil().max(1.0);
            let h = remaining / nrem;
            let info = st.step_in_place(&mut u, nl, h);
            trace.steps += 1;
            t += h;
            remaining -= h;
            if !all_finite(&u) || !info.grad_norm_sq.is_finite() {
                trace.stop_reason = StopReason::NumericalOverflow;
                trace.notes = format!("non-finite field at t = {t}");
                break 'outer;
            }
            let stop = if info.grad_norm_sq > cfg.blowup_growth * g0 {
                Some(StopReason::BlowupIndicated)
            } else if info.tail_fraction > cfg.tail_mass_fraction {
                Some(StopReason::ResolutionExhausted)
            } else if trace.steps >= cfg.max_steps {
                trace.notes = format!("step limit {} reached", cfg.max_steps);
                Some(StopReason::ResolutionExhausted)
            } else {
                None
            };
            if let Some(reason) = stop {
                trace.stop_reason = reason;
                if t > *trace.times.last().unwrap_or(&0.0) {
                    if let Err(e) = sample(&mut st, &u, t, &mut trace) {
                        trace.stop_reason = StopReason::NumericalOverflow;
                        trace.notes = e.to_string();
                    }
                }
                break 'outer;
            }
            if nrem <= 1.0 {
                break;
            }
        }
        t = target;
        if let Err(e) = sample(&mut st, &u, t, &mut trace) {
            trace.stop_reason = StopReason::NumericalOverflow;
            trace.notes = e.to_string();
            break;
        }
    }
    if trace.stop_reason == StopReason::BlowupIndicated {
        trace.blowup_time_estimate = blowup_time_fit(&trace);
    }
    Ok(Evolution { trace, field: FieldProfile::from_raw(grid, u) })
}

/// Zero of the least-squares line through the tail of `1/‖u_x‖`.
fn blowup_time_fit(trace: &SimulationTrace) -> Option<f64> {
    let n = trace.len();
    if n < 3 {
        return None;
    }
    let m = (n / 4).max(3).min(n);
    let pts: Vec<(f64, f64)> =
        (n - m..n).map(|i| (trace.times[i], 1.0 / trace.grad_norm_sq[i].sqrt())).collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return None;
    }
    let root = mx - my / slope;
    root.is_finite().then_some(root)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceAnalysis {
    pub mass_drift: f64,
    pub energy_drift: f64,
    /// `max|D²V − V_tt| / max|V_tt|` over interior samples.
    pub virial_mismatch: f64,
    /// Second differences of `V` are negative at every interior sample.
    pub vtt_negative: bool,
    /// `V_t` strictly decreasing over the samples.
    pub rate_decreasing: bool,
    pub blowup_time_estimate: Option<f64>,
}

/// Drift, virial consistency and concavity diagnostics of a trace.
pub fn analyze_trace(
    trace: &SimulationTrace,
    obs0: &Observables,
    _nl: &Nonlinearity,
) -> Result<TraceAnalysis> {
    let n = trace.len();
    if n < 5 {
        return domain(format!("trace has {n} samples, need at least 5"));
    }
    let drift = |v: &[f64], v0: f64| {
        let scale = v0.abs().max(f64::MIN_POSITIVE);
        v.iter().fold(0.0f64, |m, x| m.max((x - v0).abs() / scale))
    };
    let mass_drift = drift(&trace.mass, obs0.mass);
    let energy_drift = drift(&trace.energy, obs0.energy);

    let (t, v) = (&trace.times, &trace.variance);
    let mut max_diff = 0.0f64;
    let mut max_rhs = 0.0f64;
    let mut vtt_negative = true;
    for i in 1..n - 1 {
        let (h1, h2) = (t[i] - t[i - 1], t[i + 1] - t[i]);
        let d2 = 2.0 * ((v[i + 1] - v[i]) / h2 - (v[i] - v[i - 1]) / h1) / (h1 + h2);
        vtt_negative &= d2 < 0.0;
        max_diff = max_diff.max((d2 - trace.virial_rhs[i]).abs());
        max_rhs = max_rhs.max(trace.virial_rhs[i].abs());
    }
    let rate_decreasing = trace.variance_rate.windows(2).all(|w| w[1] < w[0]);
    Ok(TraceAnalysis {
        mass_drift,
        energy_drift,
        virial_mismatch: if max_rhs > 0.0 { max_diff / max_rhs } else { max_diff },
        vtt_negative,
        rate_decreasing,
        blowup_time_estimate: trace.blowup_time_estimate,
    })
}

/// JSON sidecar carrying the stop reason, blow-up estimate and analysis.
pub fn trace_sidecar(trace: &SimulationTrace, analysis: Option<&TraceAnalysis>) -> serde_json::Value {
    serde_json::json!({
        "stop_reason": trace.stop_reason,
        "blowup_time_estimate": trace.blowup_time_estimate,
        "steps": trace.steps,
        "samples": trace.len(),
        "final_time": trace.times.last(),
        "notes": trace.notes,
        "analysis": analysis,
    })
}
