//! Run configuration read from TOML. Every field has a default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldProfile, Grid};
use crate::nonlinearity::{Nonlinearity, DEFAULT_TRUNCATION};
use crate::profiles::{build_profile, ProfileFamily};
use crate::solver::SolverConfig;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub nonlinearity: NonlinearityConfig,
    pub profile: ProfileConfig,
    pub grid: GridConfig,
    pub criteria: CriteriaConfig,
    pub scan: ScanConfig,
    pub solver: SolverConfig,
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearityKind {
    #[default]
    Terms,
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonlinearityConfig {
    pub kind: NonlinearityKind,
    /// `[coefficient, exponent]` pairs of `N = Σ c|u|^β`.
    pub terms: Vec<[f64; 2]>,
    pub truncation: usize,
}

impl Default for NonlinearityConfig {
    fn default() -> Self {
        Self { kind: NonlinearityKind::Terms, terms: vec![[1.0, 2.0]], truncation: DEFAULT_TRUNCATION }
    }
}

impl NonlinearityConfig {
    pub fn build(&self) -> Result<Nonlinearity> {
        match self.kind {
            NonlinearityKind::Terms => {
                let pairs: Vec<(f64, f64)> = self.terms.iter().map(|t| (t[0], t[1])).collect();
                Nonlinearity::from_pairs(&pairs)
            }
            NonlinearityKind::Exponential => Nonlinearity::exponential(self.truncation),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    #[default]
    ChirpedGaussian,
    WeightedDecay,
    PositiveGaussian,
    PolynomialDecay,
    /// Samples read from a CSV file (`x,re,im`).
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConfig {
    pub family: FamilyKind,
    pub theta: f64,
    pub a: f64,
    pub b: f64,
    pub n: f64,
    pub path: Option<PathBuf>,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self { family: FamilyKind::ChirpedGaussian, theta: 0.0, a: 1.0, b: 0.0, n: 2.0, path: None }
    }
}

impl ProfileConfig {
    pub fn family(&self) -> Option<ProfileFamily> {
        let (theta, a, b, n) = (self.theta, self.a, self.b, self.n);
        Some(match self.family {
            FamilyKind::ChirpedGaussian => ProfileFamily::ChirpedGaussian { theta, a, b },
            FamilyKind::WeightedDecay => ProfileFamily::WeightedDecay { theta, a, n, b },
            FamilyKind::PositiveGaussian => ProfileFamily::PositiveGaussian { a },
            FamilyKind::PolynomialDecay => ProfileFamily::PolynomialDecay { a },
            FamilyKind::Csv => return None,
        })
    }
}

/// Grid override; omitted fields take the family's recommendation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: Option<f64>,
    pub num_points: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DrChoice {
    #[default]
    Sharp,
    AsPrinted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriteriaConfig {
    /// `auto` or any of `triple`, `exponential`, `exponential-refined`,
    /// `general-sum`, `double-positive`.
    pub select: Vec<String>,
    pub real_data_shortcut: bool,
    pub dr_constant: DrChoice,
}

impl Default for CriteriaConfig {
    fn default() -> Self {
        Self { select: vec!["auto".into()], real_data_shortcut: false, dr_constant: DrChoice::Sharp }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub which: String,
    /// `printed`, `direct` or `positive-energy`.
    pub view: String,
    /// `name:min:max:count`.
    pub x: String,
    pub y: Option<String>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            which: "subcondition2-exp".into(),
            view: "printed".into(),
            x: "theta:0:10:100".into(),
            y: Some("A:0:10:100".into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from(".") }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn grid(&self) -> Result<Grid> {
        let rec = self
            .profile
            .family()
            .map_or(Grid { half_width: 20.0, num_points: 2048 }, |f| f.recommended_grid());
        Grid::new(
            self.grid.half_width.unwrap_or(rec.half_width),
            self.grid.num_points.unwrap_or(rec.num_points),
        )
    }

    pub fn field(&self) -> Result<FieldProfile> {
        match self.profile.family() {
            Some(f) => build_profile(&f, self.grid()?),
            None => {
                let path =
                    self.profile.path.as_ref().ok_or_else(|| {
                        Error::Config("profile.path is required for family = \"csv\"".into())
                    })?;
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                FieldProfile::from_csv(&text)
            }
        }
    }
}
