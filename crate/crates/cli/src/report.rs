use leafwind_core::index::{MethodResult, TheoremReport};
use leafwind_core::Error;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct MethodRecord {
    pub method: &'static str,
    pub quarters: i64,
    pub halves: i64,
    pub display: String,
    pub float_oracle: f64,
    pub samples_used: usize,
    pub refinement_depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl From<&MethodResult> for MethodRecord {
    fn from(r: &MethodResult) -> Self {
        MethodRecord {
            method: r.method.name(),
            quarters: r.value.quarters(),
            halves: r.value.halves(),
            display: r.value.to_string(),
            float_oracle: r.float_oracle,
            samples_used: r.samples_used,
            refinement_depth: r.refinement_depth,
            reason: r.reason.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub stage: String,
    pub kind: String,
    pub message: String,
}

impl ErrorRecord {
    pub fn new(stage: impl Into<String>, e: &Error) -> Self {
        ErrorRecord { stage: stage.into(), kind: error_kind(e), message: e.to_string() }
    }
}

/// Variant name of a library error, e.g. `RefinementExhausted`.
pub fn error_kind(e: &Error) -> String {
    let debug = format!("{e:?}");
    debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

#[derive(Debug, Serialize)]
pub struct ChoicesRecord {
    pub checked: usize,
    pub consistent: bool,
    pub first_mismatch: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub methods: Vec<MethodRecord>,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub choices: Option<ChoicesRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u128>,
}

impl Report {
    pub fn new(r: &TheoremReport, seed: u64, timing: bool) -> Self {
        let choices = r.choices.as_ref().map(|c| ChoicesRecord {
            checked: c.values.len(),
            consistent: c.consistent,
            first_mismatch: c.values.iter().find(|(_, v)| *v != c.values[0].1).map(|(label, v)| format!("{label}: {v}")),
        });
        Report {
            scenario: r.name.clone(),
            seed,
            methods: r.results.iter().map(MethodRecord::from).collect(),
            verdict: r.verdict,
            choices,
            error: r.failure.as_ref().map(|(stage, e)| ErrorRecord::new(stage.clone(), e)),
            wall_ms: timing.then_some(r.wall_ms),
        }
    }
}

/// One row of the Theorem A sweep.
#[derive(Debug)]
pub struct SweepRow {
    pub n: i64,
    pub halves: [Option<i64>; 3],
    pub float_oracle: Option<f64>,
    pub verdict: bool,
    pub failure: Option<String>,
    pub ms: u128,
}

pub const CSV_HEADER: &str = "n,ph_halves,leroux_halves,foliation_halves,float_oracle,verdict,ms";

impl SweepRow {
    pub fn csv(&self) -> String {
        let cell = |v: Option<i64>| v.map_or_else(|| "FAILED".to_string(), |h| h.to_string());
        let oracle = self.float_oracle.map_or_else(|| "FAILED".to_string(), |x| format!("{x:.12}"));
        let verdict = if self.failure.is_some() { "FAILED".to_string() } else { self.verdict.to_string() };
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            cell(self.halves[0]),
            cell(self.halves[1]),
            cell(self.halves[2]),
            oracle,
            verdict,
            self.ms
        )
    }
}
