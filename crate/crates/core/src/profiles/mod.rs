//! Initial-data families, the quadratic-phase negative-energy construction,
//! closed-form conditions and parameter-region scans.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::field::{sample_profile, FieldProfile, Grid};
use crate::nonlinearity::Nonlinearity;
use crate::observables::{compute_observables, Observables};

mod closed_form;
mod scan;

pub use closed_form::{
    closed_form_condition, positive_gaussian_table, subcondition2, weighted_condition, ClosedForm,
    ClosedFormResult, MomentRow, Side, DEFAULT_SERIES_TERMS,
};
pub use scan::{scan_region, Axis, ScanCell, ScanResult, ScanView, THREADS_ENV};

pub type ProfileFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum ProfileFamily {
    /// `e^{ibx²/4}·A e^{iθx²} e^{−x²/2}`.
    ChirpedGaussian {
        theta: f64,
        a: f64,
        b: f64,
    },
    /// `e^{ibx²/4}·A e^{−iθ/⟨x⟩}/⟨x⟩ⁿ`, `⟨x⟩ = (1+x²)^{1/2}`.
    WeightedDecay {
        theta: f64,
        a: f64,
        n: f64,
        b: f64,
    },
    /// `A e^{−x²}`.
    PositiveGaussian {
        a: f64,
    },
    /// `A/(1+x²)`.
    PolynomialDecay {
        a: f64,
    },
    Custom(ProfileFn),
}

impl fmt::Debug for ProfileFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileFamily::ChirpedGaussian { theta, a, b } => {
                write!(f, "ChirpedGaussian {{ theta: {theta}, a: {a}, b: {b} }}")
            }
            ProfileFamily::WeightedDecay { theta, a, n, b } => {
                write!(f, "WeightedDecay {{ theta: {theta}, a: {a}, n: {n}, b: {b} }}")
            }
            ProfileFamily::PositiveGaussian { a } => write!(f, "PositiveGaussian {{ a: {a} }}"),
            ProfileFamily::PolynomialDecay { a } => write!(f, "PolynomialDecay {{ a: {a} }}"),
            ProfileFamily::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl ProfileFamily {
    pub fn validate(&self) -> Result<()> {
        let amp = match self {
            ProfileFamily::ChirpedGaussian { a, theta, b } => {
                finite(&[*theta, *b])?;
                *a
            }
            ProfileFamily::WeightedDecay { a, n, theta, b } => {
                finite(&[*theta, *b])?;
                if !(*n > 1.5) {
                    return domain(format!("weighted decay needs n > 3/2, got {n}"));
                }
                *a
            }
            ProfileFamily::PositiveGaussian { a } | ProfileFamily::PolynomialDecay { a } => *a,
            ProfileFamily::Custom(_) => return Ok(()),
        };
        if !(amp > 0.0 && amp.is_finite()) {
            return domain(format!("amplitude {amp} must be positive"));
        }
        Ok(())
    }

    /// Grid on which the family's boundary amplitude is negligible.
    pub fn recommended_grid(&self) -> Grid {
        match self {
            ProfileFamily::WeightedDecay { .. } | ProfileFamily::PolynomialDecay { .. } => {
                Grid { half_width: 200.0, num_points: 1 << 14 }
            }
            _ => Grid { half_width: 20.0, num_points: 2048 },
        }
    }

    /// The family as a pointwise closure.
    pub fn closure(&self) -> ProfileFn {
        match *self {
            ProfileFamily::ChirpedGaussian { theta, a, b } => Arc::new(move |x: f64| {
                let phase = (theta + b / 4.0) * x * x;
                Complex64::from_polar(a * (-x * x / 2.0).exp(), phase)
            }),
            ProfileFamily::WeightedDecay { theta, a, n, b } => Arc::new(move |x: f64| {
                let br = (1.0 + x * x).sqrt();
                Complex64::from_polar(a * br.powf(-n), b * x * x / 4.0 - theta / br)
            }),
            ProfileFamily::PositiveGaussian { a } => {
                Arc::new(move |x: f64| Complex64::new(a * (-x * x).exp(), 0.0))
            }
            ProfileFamily::PolynomialDecay { a } => {
                Arc::new(move |x: f64| Complex64::new(a / (1.0 + x * x), 0.0))
            }
            ProfileFamily::Custom(ref f) => f.clone(),
        }
    }

    /// Same family with the quadratic chirp removed (`b = 0`); `None` for
    /// families that carry no chirp parameter.
    pub fn unchirped(&self) -> Option<(ProfileFamily, f64)> {
        match *self {
            ProfileFamily::ChirpedGaussian { theta, a, b } => {
                Some((ProfileFamily::ChirpedGaussian { theta, a, b: 0.0 }, b))
            }
            ProfileFamily::WeightedDecay { theta, a, n, b } => {
                Some((ProfileFamily::WeightedDecay { theta, a, n, b: 0.0 }, b))
            }
            _ => None,
        }
    }
}

fn finite(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        domain("non-finite family parameter")
    }
}

/// Samples the family on `grid`.
pub fn build_profile(fam: &ProfileFamily, grid: Grid) -> Result<FieldProfile> {
    fam.validate()?;
    let f = fam.closure();
    sample_profile(|x| f(x), grid)
}

/// Energy of `u₀ = e^{ibx²/4}v₀` split into its pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChirpReport {
    pub b: f64,
    pub energy_v0: f64,
    /// `(b²/8)‖xv₀‖²`.
    pub quadratic_piece: f64,
    /// `(b/2) Im∫x v₀′ v̄₀`.
    pub cross_piece: f64,
    pub energy_u0: f64,
    /// `|b|/4·‖xv₀‖² < Im∫x v₀′ v̄₀`, which makes the two chirp pieces negative.
    pub requirement_holds: bool,
    pub energy_negative: bool,
    pub mass: f64,
}

/// Negative-energy check for chirped data built from `v0` with `b < 0`.
pub fn chirp_negative_energy_check(v0: &FieldProfile, b: f64, nl: &Nonlinearity) -> Result<ChirpReport> {
    if !(b < 0.0 && b.is_finite()) {
        return domain(format!("chirp parameter b = {b} must be negative"));
    }
    let o: Observables = compute_observables(v0, nl)?;
    let im = o.variance_rate / 4.0;
    let quadratic_piece = b * b / 8.0 * o.variance;
    let cross_piece = b / 2.0 * im;
    let energy_u0 = o.energy + quadratic_piece + cross_piece;
    Ok(ChirpReport {
        b,
        energy_v0: o.energy,
        quadratic_piece,
        cross_piece,
        energy_u0,
        requirement_holds: b.abs() / 4.0 * o.variance < im,
        energy_negative: energy_u0 < 0.0,
        mass: o.mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gauss_v0(theta: f64, a: f64) -> FieldProfile {
        let fam = ProfileFamily::ChirpedGaussian { theta, a, b: 0.0 };
        build_profile(&fam, fam.recommended_grid()).unwrap()
    }

    #[test]
    fn family_values() {
        let fam = ProfileFamily::ChirpedGaussian { theta: 0.0, a: 1.0, b: 0.0 };
        assert_eq!(fam.closure()(0.0), Complex64::new(1.0, 0.0));
        let fam = ProfileFamily::WeightedDecay { theta: 1.0, a: 2.0, n: 2.0, b: 0.0 };
        assert!((fam.closure()(1.0).norm() - 1.0).abs() < 1e-15);
        assert!(ProfileFamily::WeightedDecay { theta: 1.0, a: 2.0, n: 1.5, b: 0.0 }.validate().is_err());
        assert!(ProfileFamily::PolynomialDecay { a: 0.0 }.validate().is_err());
    }

    #[test]
    fn polynomial_mass() {
        let fam = ProfileFamily::PolynomialDecay { a: 1.0 };
        let u = build_profile(&fam, fam.recommended_grid()).unwrap();
        let o = compute_observables(&u, &Nonlinearity::empty()).unwrap();
        assert!((o.mass - PI / 2.0).abs() < 1e-4);
    }

    #[test]
    fn gaussian_chirp_requirement() {
        let nl = Nonlinearity::exponential(64).unwrap();
        let v0 = gauss_v0(0.2, 1.0);
        assert!(chirp_negative_energy_check(&v0, -1.0, &nl).unwrap().requirement_holds);
        assert!(!chirp_negative_energy_check(&v0, -2.0, &nl).unwrap().requirement_holds);
        let real = gauss_v0(0.0, 1.0);
        assert!(!chirp_negative_energy_check(&real, -0.5, &nl).unwrap().requirement_holds);
        assert!(chirp_negative_energy_check(&real, 0.5, &nl).is_err());
    }

    #[test]
    fn weighted_chirp_threshold() {
        // θ > 15π|b|/32 for n = 2.
        let nl = Nonlinearity::empty();
        let thr = 15.0 * PI / 32.0;
        for (theta, want) in [(thr * 1.02, true), (thr * 0.98, false), (1.0, false)] {
            let fam = ProfileFamily::WeightedDecay { theta, a: 1.0, n: 2.0, b: 0.0 };
            let v0 = build_profile(&fam, fam.recommended_grid()).unwrap();
            let r = chirp_negative_energy_check(&v0, -1.0, &nl).unwrap();
            assert_eq!(r.requirement_holds, want, "theta = {theta}");
        }
    }

    #[test]
    fn chirp_pieces_match_direct_energy() {
        let nl = Nonlinearity::from_pairs(&[(1.0, 4.0)]).unwrap();
        let v0 = gauss_v0(0.3, 1.2);
        let r = chirp_negative_energy_check(&v0, -0.8, &nl).unwrap();
        let fam = ProfileFamily::ChirpedGaussian { theta: 0.3, a: 1.2, b: -0.8 };
        let u0 = build_profile(&fam, fam.recommended_grid()).unwrap();
        let e = compute_observables(&u0, &nl).unwrap().energy;
        assert!((r.energy_u0 - e).abs() < 1e-10);
    }
}
