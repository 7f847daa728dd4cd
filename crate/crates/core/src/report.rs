//! Structured pass/fail records shared by every verification pass.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Bumped whenever the JSON layout of reports changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Relative slack allowed between an observed value and its bound.
pub const RELATIVE_TOLERANCE: f64 = 1e-9;

pub type Params = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub check: String,
    pub params: Params,
    pub bound: f64,
    pub observed: f64,
    /// `observed / bound`, absent when the bound is zero.
    pub ratio: Option<f64>,
    /// Ratio against a scaling reference whose constant is not explicit;
    /// informational only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference_ratio: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
}

impl Record {
    /// A record that passes iff `observed <= bound (1 + 1e-9)`.
    pub fn bounded(check: impl Into<String>, bound: f64, observed: f64) -> Self {
        let pass = observed <= bound * (1.0 + RELATIVE_TOLERANCE) || observed <= bound;
        Record {
            check: check.into(),
            params: Params::new(),
            bound,
            observed,
            ratio: (bound != 0.0 && bound.is_finite()).then(|| observed / bound),
            reference_ratio: None,
            pass,
            witness: None,
        }
    }

    /// Zero-violation count record: bound 0, observed = number of violations.
    pub fn violations(check: impl Into<String>, count: usize, witness: Option<String>) -> Self {
        let mut r = Self::bounded(check, 0.0, count as f64);
        if !r.pass {
            r.witness = witness;
        }
        r
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        if !self.pass {
            self.witness = Some(witness.into());
        }
        self
    }

    pub fn with_reference_ratio(mut self, r: f64) -> Self {
        self.reference_ratio = Some(r);
        self
    }
}

/// A reported quantity with no pass/fail semantics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    pub params: Params,
    pub value: f64,
}

impl Measurement {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Measurement {
            name: name.into(),
            params: Params::new(),
            value,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    pub subject: String,
    pub seed: Option<u64>,
    pub pass: bool,
    pub records: Vec<Record>,
    pub measurements: Vec<Measurement>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, subject: impl Into<String>) -> Self {
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            suite: suite.into(),
            subject: subject.into(),
            seed: None,
            pass: true,
            records: Vec::new(),
            measurements: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn push(&mut self, record: Record) {
        self.pass &= record.pass;
        self.records.push(record);
    }

    pub fn measure(&mut self, m: Measurement) {
        self.measurements.push(m);
    }

    /// Appends the records and measurements of `other`.
    pub fn absorb(&mut self, other: VerificationReport) {
        for r in other.records {
            self.push(r);
        }
        self.measurements.extend(other.measurements);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn records_for<'a>(&'a self, check: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
        self.records.iter().filter(move |r| r.check == check)
    }

    /// Record with the largest `observed / bound` among those named `check`.
    pub fn worst<'a>(&'a self, check: &'a str) -> Option<&'a Record> {
        self.records_for(check).max_by(|a, b| {
            let ka = a.ratio.unwrap_or(if a.observed > 0.0 { f64::INFINITY } else { 0.0 });
            let kb = b.ratio.unwrap_or(if b.observed > 0.0 { f64::INFINITY } else { 0.0 });
            ka.total_cmp(&kb)
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only serializable data")
    }
}
