//! Sufficient conditions for finite-time blow-up evaluated on observables.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

mod negative;
mod positive;
mod triple;

pub use negative::{check_exponential_negative, check_general_sum_negative};
pub use positive::{
    check_double_positive, check_double_positive_with, evaluate_double_positive, general_radicand,
    p5_radicand, DoublePositiveEval, DrConstant,
};
pub use triple::{check_triple_negative, classify_triple, TripleCase};

use crate::error::domain;
use crate::nonlinearity::Nonlinearity;
use crate::observables::Observables;

/// Criterion names accepted by [`run_criterion`].
pub const CRITERION_NAMES: [&str; 5] =
    ["triple", "exponential", "exponential-refined", "general-sum", "double-positive"];

/// Criteria whose term structure matches `nl`.
pub fn auto_select(nl: &Nonlinearity) -> Vec<&'static str> {
    if nl.is_exponential() {
        return vec!["exponential", "exponential-refined", "general-sum"];
    }
    let terms = nl.terms();
    let mut v = vec!["general-sum"];
    if terms.len() == 3 {
        v.push("triple");
    }
    if terms.len() == 2 && terms[0].coefficient < 0.0 && terms[1].coefficient > 0.0 {
        v.push("double-positive");
    }
    v
}

/// Runs the named criterion, mapping the terms of `nl` onto its parameters.
pub fn run_criterion(
    name: &str,
    nl: &Nonlinearity,
    obs: &Observables,
    real_data_shortcut: bool,
    dr: DrConstant,
) -> crate::Result<CriterionReport> {
    let terms = nl.terms();
    Ok(match name {
        "exponential" => check_exponential_negative(obs, false),
        "exponential-refined" => check_exponential_negative(obs, true),
        "general-sum" => check_general_sum_negative(nl, obs),
        "triple" => {
            if terms.len() != 3 {
                return domain("triple criterion needs exactly three terms");
            }
            let lambda = [-terms[0].coefficient, -terms[1].coefficient, -terms[2].coefficient];
            let alpha = [terms[0].exponent, terms[1].exponent, terms[2].exponent];
            check_triple_negative(lambda, alpha, obs)
        }
        "double-positive" => {
            if terms.len() != 2 {
                return domain("double-positive criterion needs exactly two terms");
            }
            check_double_positive_with(
                terms[0].coefficient,
                terms[1].coefficient,
                terms[0].exponent + 1.0,
                terms[1].exponent + 1.0,
                obs,
                real_data_shortcut,
                dr,
            )
        }
        other => return domain(format!("unknown criterion '{other}'")),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CriterionId {
    TripleNegative(TripleCase),
    ExponentialNegative,
    ExponentialNegativeRefined,
    GeneralSumNegative,
    GeneralSumNegativeSpecial,
    DoublePositiveP5,
    DoublePositiveGeneral,
    RealDataShortcut,
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriterionId::TripleNegative(c) => write!(f, "TripleNegative({c})"),
            CriterionId::ExponentialNegative => f.write_str("ExponentialNegative"),
            CriterionId::ExponentialNegativeRefined => f.write_str("ExponentialNegativeRefined"),
            CriterionId::GeneralSumNegative => f.write_str("GeneralSumNegative"),
            CriterionId::GeneralSumNegativeSpecial => f.write_str("GeneralSumNegativeSpecial"),
            CriterionId::DoublePositiveP5 => f.write_str("DoublePositiveP5"),
            CriterionId::DoublePositiveGeneral => f.write_str("DoublePositiveGeneral"),
            CriterionId::RealDataShortcut => f.write_str("RealDataShortcut"),
        }
    }
}

impl Serialize for CriterionId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Intermediate constants of one check. Unused entries are omitted from JSON.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CriterionParameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub delta_k: Vec<f64>,
    #[serde(rename = "C_k", skip_serializing_if = "Vec::is_empty")]
    pub c_k: Vec<f64>,
    #[serde(rename = "C_star", skip_serializing_if = "Option::is_none")]
    pub c_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(rename = "B_max", skip_serializing_if = "Option::is_none")]
    pub b_max: Option<f64>,
    #[serde(rename = "U_B_max", skip_serializing_if = "Option::is_none")]
    pub u_b_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Further named quantities (H, α, V_max, particle energy, ...).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub criterion_id: CriterionId,
    pub applicable: bool,
    pub satisfied: bool,
    /// Positive iff satisfied.
    pub margin: f64,
    pub parameters: CriterionParameters,
    pub notes: String,
}

impl CriterionReport {
    pub(crate) fn not_applicable(id: CriterionId, note: impl Into<String>) -> Self {
        Self {
            criterion_id: id,
            applicable: false,
            satisfied: false,
            margin: 0.0,
            parameters: CriterionParameters::default(),
            notes: note.into(),
        }
    }

    /// Report for `E < −T·M` with margin `−(E + T·M)`.
    pub(crate) fn energy_threshold(
        id: CriterionId,
        energy: f64,
        mass: f64,
        threshold: f64,
        mut parameters: CriterionParameters,
        notes: String,
    ) -> Self {
        let margin = -(energy + threshold * mass);
        parameters.threshold = Some(threshold);
        Self { criterion_id: id, applicable: true, satisfied: margin > 0.0, margin, parameters, notes }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub(crate) fn push_note(notes: &mut String, note: &str) {
    if !notes.is_empty() {
        notes.push_str("; ");
    }
    notes.push_str(note);
}
