//! Mass, energy, variance and the inequalities used by the virial argument.

use serde::{Deserialize, Serialize};

use crate::constants::sharp_cstar;
use crate::error::{Error, Result};
use crate::field::{lp_norm, FieldProfile, Spectral};
use crate::nonlinearity::Nonlinearity;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub mass: f64,
    pub kinetic: f64,
    pub energy: f64,
    pub variance: f64,
    pub variance_rate: f64,
    pub grad_norm_sq: f64,
    /// `c_j/(β_j+2)·‖u‖^{β_j+2}` per term; a single lumped `∫G(|u|)` for the
    /// exponential series.
    pub potential_terms: Vec<f64>,
}

impl Observables {
    pub fn zero() -> Self {
        Self {
            mass: 0.0,
            kinetic: 0.0,
            energy: 0.0,
            variance: 0.0,
            variance_rate: 0.0,
            grad_norm_sq: 0.0,
            potential_terms: Vec::new(),
        }
    }

    /// `y = -V_t/4`.
    pub fn y(&self) -> f64 {
        -self.variance_rate / 4.0
    }
}

/// Quadrature settings for [`compute_observables_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    /// Add a fitted power-law tail beyond the box to mass and variance.
    pub far_field_tail: bool,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { far_field_tail: true }
    }
}

/// Intermediate integrals shared by the observables and the virial right-hand side.
struct Moments {
    mass: f64,
    variance: f64,
    grad_norm_sq: f64,
    variance_rate: f64,
}

fn moments(field: &FieldProfile, sp: Option<&mut Spectral>, opts: QuadratureOptions) -> Moments {
    let grid = *field.grid();
    let dx = grid.dx();
    let u = field.samples();
    let mut own;
    let sp = match sp {
        Some(s) => s,
        None => {
            own = Spectral::new(&grid);
            &mut own
        }
    };
    let mut du = sp.derivative(u);
    if field.is_real() {
        du.iter_mut().for_each(|z| z.im = 0.0);
    }
    let mut mass = 0.0;
    let mut variance = 0.0;
    let mut grad = 0.0;
    let mut rate = 0.0;
    for (j, (z, dz)) in u.iter().zip(&du).enumerate() {
        let x = grid.node(j);
        let a2 = z.norm_sqr();
        mass += a2;
        variance += x * x * a2;
        grad += dz.norm_sqr();
        rate += x * (dz * z.conj()).im;
    }
    let mut m = Moments {
        mass: mass * dx,
        variance: variance * dx,
        grad_norm_sq: grad * dx,
        variance_rate: 4.0 * rate * dx,
    };
    if opts.far_field_tail {
        m.mass += far_field_tail(field, 0.0);
        m.variance += far_field_tail(field, 2.0);
    }
    m
}

/// Estimate of `∫_{|x|>box} |x|^w |u|² dx` from a power-law fit
/// `|u|² ≈ c|x|^{-γ}` between the outermost node and `x = ±L/2` on each side.
/// Returns 0 unless the fit decays fast enough to be integrable with margin.
fn far_field_tail(field: &FieldProfile, w: f64) -> f64 {
    let grid = field.grid();
    let n = grid.num_points;
    if n < 8 {
        return 0.0;
    }
    let dx = grid.dx();
    let u = field.samples();
    // (outer node, node at half width, start of the uncovered region)
    let sides = [(0usize, n / 4, grid.half_width + 0.5 * dx), (n - 1, 3 * n / 4, grid.half_width - 0.5 * dx)];
    let mut total = 0.0;
    for (outer, mid, start) in sides {
        let f_out = u[outer].norm_sqr();
        let f_mid = u[mid].norm_sqr();
        let x_out = grid.node(outer).abs();
        let x_mid = grid.node(mid).abs();
        if !(f_out > 0.0 && f_mid > f_out) {
            continue;
        }
        let gamma = (f_mid / f_out).ln() / (x_out / x_mid).ln();
        if !(gamma.is_finite() && gamma > w + 1.5) {
            continue;
        }
        let ln_tail =
            f_out.ln() + gamma * x_out.ln() + (w + 1.0 - gamma) * start.ln() - (gamma - w - 1.0).ln();
        total += ln_tail.exp();
    }
    total
}

fn check(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(name.to_string()))
    }
}

/// Observables with the default quadrature (far-field tail included).
pub fn compute_observables(field: &FieldProfile, nl: &Nonlinearity) -> Result<Observables> {
    compute_observables_with(field, nl, QuadratureOptions::default(), None)
}

/// Observables with explicit quadrature options and an optional reusable
/// transform for the field's grid.
pub fn compute_observables_with(
    field: &FieldProfile,
    nl: &Nonlinearity,
    opts: QuadratureOptions,
    sp: Option<&mut Spectral>,
) -> Result<Observables> {
    let m = moments(field, sp, opts);
    let potential = field.integrate(|a, _| nl.potential_unchecked(a));
    let potential_terms = match nl {
        Nonlinearity::ExponentialSeries { .. } => vec![potential],
        Nonlinearity::FiniteSum { .. } => nl.potential_terms_with(|r| field.integrate(|a, _| a.powf(r))),
    };
    let kinetic = 0.5 * m.grad_norm_sq;
    let obs = Observables {
        mass: check("mass", m.mass)?,
        kinetic: check("kinetic", kinetic)?,
        energy: check("energy", kinetic - check("potential", potential)?)?,
        variance: check("variance", m.variance)?,
        variance_rate: check("variance_rate", m.variance_rate)?,
        grad_norm_sq: check("grad_norm_sq", m.grad_norm_sq)?,
        potential_terms,
    };
    for (j, t) in obs.potential_terms.iter().enumerate() {
        check(&format!("potential_terms[{j}]"), *t)?;
    }
    Ok(obs)
}

/// `V_tt = 8‖u_x‖² − 4∫W(|u|)`.
pub fn virial_rhs(field: &FieldProfile, nl: &Nonlinearity) -> Result<f64> {
    virial_rhs_with(field, nl, None)
}

pub fn virial_rhs_with(field: &FieldProfile, nl: &Nonlinearity, sp: Option<&mut Spectral>) -> Result<f64> {
    let m = moments(field, sp, QuadratureOptions { far_field_tail: false });
    let w = field.integrate(|a, _| nl.virial_unchecked(a));
    check("virial_rhs", 8.0 * m.grad_norm_sq - 4.0 * w)
}

/// `‖u_x‖² − ¼(M²/V + V_t²/(4V))`, nonnegative by the uncertainty principle.
pub fn uncertainty_gap(field: &FieldProfile) -> Result<f64> {
    let m = moments(field, None, QuadratureOptions::default());
    if !(m.variance > 0.0) {
        return Err(Error::Degenerate("variance is zero".into()));
    }
    let bound =
        0.25 * (m.mass * m.mass / m.variance + m.variance_rate * m.variance_rate / (4.0 * m.variance));
    check("uncertainty_gap", m.grad_norm_sq - bound)
}

/// `C*(‖xu‖^{(p−1)/2}‖u‖_{p+1}^{p+1})^{2/(3p+1)} − ‖u‖₂`.
pub fn dr_gap(field: &FieldProfile, p: f64) -> Result<f64> {
    let cstar = sharp_cstar(p)?;
    let m = moments(field, None, QuadratureOptions::default());
    if !(m.mass > 0.0) {
        return Err(Error::Degenerate("zero field".into()));
    }
    let xu = m.variance.sqrt();
    let lp = field.integrate(|a, _| a.powf(p + 1.0));
    let rhs = cstar * (xu.powf(0.5 * (p - 1.0)) * lp).powf(2.0 / (3.0 * p + 1.0));
    check("dr_gap", rhs - m.mass.sqrt())
}

/// `c_gn‖u_x‖^{(p−1)/2}‖u‖^{(p−1)/2+2} − ‖u‖_{p+1}^{p+1}`.
pub fn gn_gap(field: &FieldProfile, p: f64, c_gn: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("p = {p} must exceed 1")));
    }
    let m = moments(field, None, QuadratureOptions { far_field_tail: false });
    if !(m.mass > 0.0) {
        return Err(Error::Degenerate("zero field".into()));
    }
    let h = 0.5 * (p - 1.0);
    let ux = m.grad_norm_sq.sqrt();
    let u2 = m.mass.sqrt();
    let lp = lp_norm(field, p + 1.0)?.powf(p + 1.0);
    check("gn_gap", c_gn * ux.powf(h) * u2.powf(h + 2.0) - lp)
}

/// `‖xu₀‖₂ / y₀` when `y₀ = −V_t/4 > 0`. The bound on the blow-up time carries
/// an unspecified constant, so only this unnormalized ratio is reported.
pub fn blowup_time_ratio(field: &FieldProfile) -> Option<f64> {
    let m = moments(field, None, QuadratureOptions::default());
    let y0 = -m.variance_rate / 4.0;
    (y0 > 0.0).then(|| m.variance.sqrt() / y0)
}
