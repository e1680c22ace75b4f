//! JSON records. Every number is rounded to 12 significant digits and
//! non-finite values are written as `null`.

use serde::{Serialize, Serializer};

use drovar_core::{BoundResult, ExtReal, FDivergenceFamily};

/// A float serialized with 12 significant digits, or `null` when not finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

pub fn round12(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().unwrap_or(x)
    } else {
        x
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(round12(self.0))
        } else {
            s.serialize_none()
        }
    }
}

impl From<ExtReal> for Num {
    fn from(v: ExtReal) -> Self {
        Num(v.to_f64())
    }
}

#[derive(Debug, Serialize)]
pub struct DualPointJson {
    pub lambda: Num,
    pub beta: Num,
    pub nu: Num,
}

#[derive(Debug, Serialize)]
pub struct DiagnosticsJson {
    pub normalization: Num,
    pub achieved_divergence: Num,
    pub mean_condition_gap: Option<Num>,
    pub boundary: bool,
}

#[derive(Debug, Serialize)]
pub struct Record {
    pub bound: Num,
    pub dual_point: DualPointJson,
    pub tilt_weights: Vec<Num>,
    pub diagnostics: DiagnosticsJson,
    pub status: &'static str,
    pub iterations: usize,
    pub eta: Num,
    pub divergence: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_value: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<Num>>,
}

impl Record {
    pub fn new(result: &BoundResult, eta: f64, family: &FDivergenceFamily) -> Self {
        let d = &result.diagnostics;
        Self {
            bound: Num(result.value),
            dual_point: DualPointJson {
                lambda: Num(result.dual_point.lambda),
                beta: Num(result.dual_point.beta),
                nu: Num(result.dual_point.nu),
            },
            tilt_weights: result.tilt.weights.iter().map(|&w| Num(w)).collect(),
            diagnostics: DiagnosticsJson {
                normalization: Num(d.normalization),
                achieved_divergence: d.achieved_divergence.into(),
                mean_condition_gap: d.mean_condition_gap.map(Num),
                boundary: d.boundary_flag,
            },
            status: result.status.as_str(),
            iterations: result.iterations,
            eta: Num(eta),
            divergence: family.to_string(),
            oracle_value: None,
            gap: None,
            x: None,
        }
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("records always serialize");
    out.push('\n');
    out
}
