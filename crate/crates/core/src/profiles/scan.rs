//! Parameter-region scans over cell-centred grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

use super::closed_form::{closed_form_condition, ClosedForm, ClosedFormResult, DEFAULT_SERIES_TERMS};

/// Environment variable fixing the worker count of scans.
pub const THREADS_ENV: &str = "NLS_BLOWUP_THREADS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(name: &str, min: f64, max: f64, count: usize) -> Result<Self> {
        let axis = Self { name: name.to_string(), min, max, count };
        axis.validate()?;
        Ok(axis)
    }

    /// Parses `name:min:max:count`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let [name, min, max, count] = parts[..] else {
            return domain(format!("axis '{spec}' is not name:min:max:count"));
        };
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Domain(format!("bad number '{s}'")));
        let count = count.parse::<usize>().map_err(|_| Error::Domain(format!("bad count '{count}'")))?;
        Self::new(name, num(min)?, num(max)?, count)
    }

    fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max && self.count > 0) {
            return domain(format!("axis '{}' has zero area", self.name));
        }
        Ok(())
    }

    /// Cell centres.
    pub fn values(&self) -> Vec<f64> {
        let h = (self.max - self.min) / self.count as f64;
        (0..self.count).map(|i| self.min + (i as f64 + 0.5) * h).collect()
    }

    fn is_theta(&self) -> bool {
        self.name.eq_ignore_ascii_case("theta") || self.name == "θ"
    }

    fn is_amplitude(&self) -> bool {
        self.name.eq_ignore_ascii_case("a") || self.name.eq_ignore_ascii_case("amplitude")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanView {
    /// The inequality as printed.
    Printed,
    /// The inequality from direct evaluation.
    Direct,
    /// Sign of the directly evaluated energy (positive-energy families only).
    PositiveEnergy,
}

impl ScanView {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(ScanView::Printed),
            "direct" => Ok(ScanView::Direct),
            "positive-energy" => Ok(ScanView::PositiveEnergy),
            _ => domain(format!("unknown scan view '{s}'")),
        }
    }

    fn cell(self, r: &ClosedFormResult) -> ScanCell {
        let side = match self {
            ScanView::Printed => r.printed,
            ScanView::Direct => r.direct,
            ScanView::PositiveEnergy => {
                let e = r.energy_direct.unwrap_or(f64::NAN);
                return ScanCell { x: 0.0, y: 0.0, satisfied: e > 0.0, margin: e };
            }
        };
        ScanCell { x: 0.0, y: 0.0, satisfied: side.holds, margin: side.margin() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub x: f64,
    pub y: f64,
    pub satisfied: bool,
    /// Positive iff satisfied.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub which: ClosedForm,
    pub view: ScanView,
    pub x_axis: Axis,
    pub y_axis: Option<Axis>,
    /// Row-major with `x` varying fastest.
    pub cells: Vec<ScanCell>,
}

impl ScanResult {
    pub fn ny(&self) -> usize {
        self.y_axis.as_ref().map_or(1, |a| a.count)
    }

    pub fn cell(&self, ix: usize, iy: usize) -> &ScanCell {
        &self.cells[iy * self.x_axis.count + ix]
    }

    pub fn satisfied_count(&self) -> usize {
        self.cells.iter().filter(|c| c.satisfied).count()
    }

    pub fn file_name(&self) -> String {
        format!("scan_{}_{}x{}.csv", self.which.name(), self.x_axis.count, self.ny())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,satisfied,margin\n");
        for c in &self.cells {
            s.push_str(&format!("{},{},{},{}\n", c.x, c.y, u8::from(c.satisfied), c.margin));
        }
        s
    }
}

/// Evaluates `which` on every cell of the grid. Two-parameter families take
/// axes named `theta` and `A` (either order); one-parameter families take a
/// single `A` axis.
pub fn scan_region(
    which: ClosedForm,
    view: ScanView,
    x_axis: &Axis,
    y_axis: Option<&Axis>,
) -> Result<ScanResult> {
    x_axis.validate()?;
    if let Some(y) = y_axis {
        y.validate()?;
    }
    if view == ScanView::PositiveEnergy && !which.is_positive_energy() {
        return domain(format!("positive-energy view is not defined for {}", which.name()));
    }
    let theta_on_x = if which.uses_theta() {
        let Some(y) = y_axis else {
            return domain(format!("{} needs theta and A axes", which.name()));
        };
        match (x_axis.is_theta(), y.is_theta(), x_axis.is_amplitude(), y.is_amplitude()) {
            (true, _, _, true) => true,
            (_, true, true, _) => false,
            _ => return domain("axes must be named theta and A"),
        }
    } else {
        if y_axis.is_some_and(|y| y.count != 1) {
            return domain(format!("{} takes a single A axis", which.name()));
        }
        if !x_axis.is_amplitude() {
            return domain("axis must be named A");
        }
        false
    };

    let xs = x_axis.values();
    let ys = y_axis.map_or_else(|| vec![0.0], Axis::values);
    let nx = xs.len();
    let eval = |idx: usize| -> Result<ScanCell> {
        let (x, y) = (xs[idx % nx], ys[idx / nx]);
        let (theta, a) = match (which.uses_theta(), theta_on_x) {
            (false, _) => (0.0, x),
            (true, true) => (x, y),
            (true, false) => (y, x),
        };
        let r = closed_form_condition(which, theta, a, DEFAULT_SERIES_TERMS)?;
        Ok(ScanCell { x, y, ..view.cell(&r) })
    };
    let n = nx * ys.len();
    let run = || (0..n).into_par_iter().map(eval).collect::<Result<Vec<_>>>();
    let cells = match std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(t) if t > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(run)?,
        _ => run()?,
    };
    Ok(ScanResult { which, view, x_axis: x_axis.clone(), y_axis: y_axis.cloned(), cells })
}
