//! Uniform periodic grids on `[-L, L)`, sampled complex fields, spectral
//! differentiation and rectangle-rule quadrature.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub half_width: f64,
    pub num_points: usize,
}

impl Grid {
    pub fn new(half_width: f64, num_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return domain(format!("half width {half_width} must be positive"));
        }
        if num_points < 2 || !num_points.is_power_of_two() {
            return domain(format!("num_points {num_points} must be a power of two >= 2"));
        }
        Ok(Self { half_width, num_points })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.num_points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.num_points).map(|j| self.node(j)).collect()
    }

    /// Symmetric wavenumbers `π m̃ / L` in FFT order; the Nyquist mode is
    /// reported with its negative sign.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.num_points as i64;
        (0..n)
            .map(|m| {
                let mm = if m < n / 2 { m } else { m - n };
                PI * mm as f64 / self.half_width
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldProfile {
    grid: Grid,
    samples: Vec<Complex64>,
}

impl FieldProfile {
    pub fn new(grid: Grid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.num_points {
            return Err(Error::Construction(format!(
                "{} samples for a grid of {} points",
                samples.len(),
                grid.num_points
            )));
        }
        if let Some(j) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Construction(format!("non-finite sample at x = {}", grid.node(j))));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, samples: vec![Complex64::new(0.0, 0.0); grid.num_points] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub(crate) fn from_raw(grid: Grid, samples: Vec<Complex64>) -> Self {
        Self { grid, samples }
    }

    pub fn is_real(&self) -> bool {
        self.samples.iter().all(|z| z.im == 0.0)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { grid: self.grid, samples: self.samples.iter().map(|z| z * factor).collect() }
    }

    /// Rectangle-rule `∫ f(|u|, x) dx`.
    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let dx = self.grid.dx();
        self.samples.iter().enumerate().map(|(j, z)| f(z.norm(), self.grid.node(j))).sum::<f64>() * dx
    }

    /// Writes `x,re,im` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,re,im\n");
        for (j, z) in self.samples.iter().enumerate() {
            let _ = writeln!(s, "{:e},{:e},{:e}", self.grid.node(j), z.re, z.im);
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut zs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('x')) {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 3 {
                return Err(Error::Construction(format!("line {}: expected 3 columns", lineno + 1)));
            }
            let parse = |c: &str| {
                c.parse::<f64>().map_err(|e| Error::Construction(format!("line {}: {e}", lineno + 1)))
            };
            xs.push(parse(cols[0])?);
            zs.push(Complex64::new(parse(cols[1])?, parse(cols[2])?));
        }
        if xs.len() < 2 {
            return Err(Error::Construction("need at least two rows".into()));
        }
        let grid = Grid::new(-xs[0], xs.len())?;
        let tol = 1e-9 * grid.half_width;
        if xs.iter().enumerate().any(|(j, &x)| (x - grid.node(j)).abs() > tol) {
            return Err(Error::Construction("x column is not a uniform grid on [-L, L)".into()));
        }
        Self::new(grid, zs)
    }
}

/// Samples `f` at every node.
pub fn sample_profile<F: Fn(f64) -> Complex64>(f: F, grid: Grid) -> Result<FieldProfile> {
    let samples = grid.nodes().into_iter().map(f).collect();
    FieldProfile::new(grid, samples)
}

/// Forward/inverse transforms and wavenumbers for one grid size.
pub struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
    scratch: Vec<Complex64>,
}

impl Spectral {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.num_points);
        let inverse = planner.plan_fft_inverse(grid.num_points);
        let len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self { forward, inverse, k: grid.wavenumbers(), scratch: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    pub fn forward(&mut self, buf: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, &mut self.scratch);
    }

    /// Inverse transform including the `1/N` normalization.
    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, &mut self.scratch);
        let inv = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|z| *z *= inv);
    }

    /// `∂_x u` with the Nyquist mode dropped.
    pub fn derivative(&mut self, u: &[Complex64]) -> Vec<Complex64> {
        let n = u.len();
        let mut buf = u.to_vec();
        self.forward(&mut buf);
        for (m, z) in buf.iter_mut().enumerate() {
            *z *= if m == n / 2 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, self.k[m]) };
        }
        self.inverse(&mut buf);
        buf
    }
}

/// Periodic spectral derivative. Real input gives an exactly real output.
pub fn spectral_derivative(field: &FieldProfile) -> FieldProfile {
    let mut sp = Spectral::new(&field.grid);
    let mut d = sp.derivative(&field.samples);
    if field.is_real() {
        d.iter_mut().for_each(|z| z.im = 0.0);
    }
    FieldProfile::from_raw(field.grid, d)
}

/// `(Σ |u_j|^p dx)^{1/p}`.
pub fn lp_norm(field: &FieldProfile, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return domain(format!("p = {p} must be >= 1"));
    }
    Ok(field.integrate(|a, _| a.powf(p)).powf(1.0 / p))
}

/// `‖u‖₂` computed from the discrete Fourier modes (Parseval).
pub fn l2_norm_spectral(field: &FieldProfile) -> f64 {
    let mut sp = Spectral::new(&field.grid);
    let mut buf = field.samples.clone();
    sp.forward(&mut buf);
    let n = buf.len() as f64;
    (buf.iter().map(|z| z.norm_sqr()).sum::<f64>() * field.grid.dx() / n).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(grid: Grid) -> FieldProfile {
        sample_profile(|x| Complex64::new((-x * x / 2.0).exp(), 0.0), grid).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(20.0, 1000).is_err());
        assert!(Grid::new(0.0, 1024).is_err());
        let g = Grid::new(20.0, 1024).unwrap();
        assert_eq!(g.dx() * 1024.0, 40.0);
        assert_eq!(g.node(0), -20.0);
    }

    #[test]
    fn samples_at_nodes() {
        let g = Grid::new(20.0, 1024).unwrap();
        let u = gauss(g);
        assert_eq!(u.samples()[512].re, 1.0);
        let g = Grid::new(4.0, 8).unwrap();
        let u = sample_profile(|x| Complex64::new(1.0 / (1.0 + x * x), 0.0), g).unwrap();
        assert_eq!(u.samples()[5].re, 0.5);
        assert!(sample_profile(|_| Complex64::new(f64::NAN, 0.0), g).is_err());
        let z = sample_profile(|_| Complex64::new(0.0, 0.0), g).unwrap();
        assert!(spectral_derivative(&z).samples().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn derivative_of_fourier_mode() {
        let g = Grid::new(5.0, 64).unwrap();
        let k1 = PI / g.half_width;
        let u = sample_profile(|x| Complex64::new(0.0, k1 * x).exp(), g).unwrap();
        let d = spectral_derivative(&u);
        for (j, z) in d.samples().iter().enumerate() {
            let want = Complex64::new(0.0, k1) * u.samples()[j];
            assert!((z - want).norm() < 1e-13);
        }
    }

    #[test]
    fn derivative_of_gaussian() {
        let g = Grid::new(20.0, 1024).unwrap();
        let d = spectral_derivative(&gauss(g));
        let err = g
            .nodes()
            .iter()
            .zip(d.samples())
            .map(|(&x, z)| (z.re + x * (-x * x / 2.0).exp()).abs().max(z.im.abs()))
            .fold(0.0, f64::max);
        assert!(err <= 1e-10, "max error {err}");
    }

    #[test]
    fn norms() {
        let g = Grid::new(20.0, 1024).unwrap();
        let u = gauss(g);
        assert!((lp_norm(&u, 2.0).unwrap() - PI.powf(0.25)).abs() < 1e-10);
        assert_eq!(lp_norm(&FieldProfile::zeros(g), 3.0).unwrap(), 0.0);
        assert!(lp_norm(&u, 0.5).is_err());
        let a = lp_norm(&u, 2.0).unwrap();
        let b = l2_norm_spectral(&u);
        assert!((a - b).abs() <= 1e-12 * a);

        let g = Grid::new(200.0, 1 << 14).unwrap();
        let u = sample_profile(|x| Complex64::new(1.0 / (1.0 + x * x), 0.0), g).unwrap();
        assert!((lp_norm(&u, 2.0).unwrap() - (PI / 2.0).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn csv_round_trip() {
        let g = Grid::new(3.0, 16).unwrap();
        let u = sample_profile(|x| Complex64::new(x.cos(), x.sin() * 0.5), g).unwrap();
        let back = FieldProfile::from_csv(&u.to_csv()).unwrap();
        assert_eq!(back, u);
        assert!(FieldProfile::from_csv("x,re,im\n0,1\n").is_err());
    }
}
