//! Run reports. Output is a pure function of the configuration and seed: no
//! timings, host names or thread counts are recorded, and floats are written
//! with a fixed format so reruns compare byte for byte.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use crate::checks::Bound;

pub const SCHEMA: &str = "sdeh-report/1";

/// A float written as `{:.16e}`; non-finite values become `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

fn nums<const N: usize>(v: &[f64; N]) -> [Num; N] {
    v.map(Num)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    AtMost,
    AtLeast,
}

impl From<Bound> for BoundName {
    fn from(b: Bound) -> Self {
        match b {
            Bound::AtMost => BoundName::AtMost,
            Bound::AtLeast => BoundName::AtLeast,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub point: [Num; 4],
    pub residual: String,
    pub value: Num,
    pub tolerance: Num,
    pub bound: BoundName,
    pub pass: bool,
}

impl Record {
    pub fn new(point: &[f64; 4], residual: String, value: f64, tolerance: f64, bound: Bound) -> Self {
        let pass = match bound {
            Bound::AtMost => value <= tolerance,
            Bound::AtLeast => value >= tolerance,
        };
        Record { point: nums(point), residual, value: Num(value), tolerance: Num(tolerance), bound: bound.into(), pass }
    }
}

/// Worst value of one residual over a run: the maximum for ordinary checks,
/// the minimum for negative controls.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub residual: String,
    pub worst: Num,
    pub tolerance: Num,
    pub bound: BoundName,
    pub count: usize,
    pub failures: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointError {
    pub point: [Num; 4],
    pub check: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Rescale {
    pub factor: Num,
    pub anchor: [Num; 4],
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub name: String,
    pub chart: String,
    pub params: BTreeMap<String, Num>,
    pub checks: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rescale: Option<Rescale>,
    pub points_total: usize,
    pub points_evaluated: usize,
    /// Points outside the chart domain.
    pub points_skipped: usize,
    /// Check evaluations abandoned because a stencil left the domain.
    pub check_skips: BTreeMap<String, usize>,
    pub errors: Vec<PointError>,
    pub summary: Vec<Summary>,
    pub records: Vec<Record>,
    pub pass: bool,
}

impl RunReport {
    /// Builds the per-residual summary (sorted by name) and the run verdict.
    pub fn finish(&mut self) {
        let mut by_name: BTreeMap<&str, Vec<&Record>> = BTreeMap::new();
        for r in &self.records {
            by_name.entry(&r.residual).or_default().push(r);
        }
        self.summary = by_name
            .into_iter()
            .map(|(name, rs)| {
                let bound = rs[0].bound;
                let values = rs.iter().map(|r| r.value.0);
                let worst = match bound {
                    BoundName::AtMost => values.fold(f64::NEG_INFINITY, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) }),
                    BoundName::AtLeast => values.fold(f64::INFINITY, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.min(b) }),
                };
                let failures = rs.iter().filter(|r| !r.pass).count();
                Summary {
                    residual: name.to_string(),
                    worst: Num(worst),
                    tolerance: rs[0].tolerance,
                    bound,
                    count: rs.len(),
                    failures,
                    pass: failures == 0,
                }
            })
            .collect();
        self.pass = self.errors.is_empty() && self.points_evaluated > 0 && self.summary.iter().all(|s| s.pass);
    }

    pub fn summary_of(&self, residual: &str) -> Option<&Summary> {
        self.summary.iter().find(|s| s.residual == residual)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool_version: &'static str,
    /// SHA-256 of the engine's convention string.
    pub conventions: String,
    pub seed: u64,
    pub runs: Vec<RunReport>,
    pub pass: bool,
}

pub fn conventions_fingerprint() -> String {
    let digest = Sha256::digest(sdeh_core::CONVENTIONS.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn new(seed: u64, runs: Vec<RunReport>) -> Self {
        let pass = runs.iter().all(|r| r.pass);
        Report {
            schema: SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION"),
            conventions: conventions_fingerprint(),
            seed,
            runs,
            pass,
        }
    }

    pub fn run(&self, name: &str) -> Option<&RunReport> {
        self.runs.iter().find(|r| r.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// One row per record with columns `x0, x1, x2, x3, check, value`. In a
    /// report with several runs the check column is `run/residual`.
    pub fn to_csv(&self) -> String {
        let qualify = self.runs.len() > 1;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["x0", "x1", "x2", "x3", "check", "value"]).expect("in-memory write");
        for run in &self.runs {
            for r in &run.records {
                let mut row: Vec<String> = r.point.iter().map(|x| format!("{:.16e}", x.0)).collect();
                row.push(if qualify { format!("{}/{}", run.name, r.residual) } else { r.residual.clone() });
                row.push(format!("{:.16e}", r.value.0));
                w.write_record(&row).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}
