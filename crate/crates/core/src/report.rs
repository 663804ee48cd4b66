//! Self-describing verification reports shared by the identity checks and
//! the verification suite.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Schema version of the JSON form of [`VerificationReport`].
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One gating comparison. `deviation` is what the report tolerance applies to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckPoint {
    pub input: String,
    pub expected: f64,
    pub actual: f64,
    pub deviation: f64,
}

/// Non-gating detail recorded alongside a report (per-seed statistics,
/// qualitative observations).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub label: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

/// Everything needed to reproduce a report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

impl Metadata {
    pub fn with_params(alpha: f64, rho: f64) -> Self {
        Self {
            alpha: Some(alpha),
            rho: Some(rho),
            ..Self::default()
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.extra.insert(key.to_string(), value.to_string());
        self
    }
}

/// Result of a named check. `passed` holds exactly when every point's
/// deviation is at most `tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub check_name: String,
    pub points: Vec<CheckPoint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observations: Vec<Observation>,
    pub tolerance: f64,
    pub passed: bool,
    pub metadata: Metadata,
}

impl VerificationReport {
    pub fn new(check_name: impl Into<String>, tolerance: f64, metadata: Metadata) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            check_name: check_name.into(),
            points: Vec::new(),
            observations: Vec::new(),
            tolerance,
            passed: true,
            metadata,
        }
    }

    pub fn push(&mut self, input: impl Into<String>, expected: f64, actual: f64, deviation: f64) {
        self.points.push(CheckPoint {
            input: input.into(),
            expected,
            actual,
            deviation,
        });
        self.passed = self.recompute_passed();
    }

    pub fn observe(&mut self, label: impl Into<String>, value: f64, note: impl Into<String>) {
        self.observations.push(Observation {
            label: label.into(),
            value,
            note: note.into(),
        });
    }

    /// Largest deviation; NaN deviations count as infinite.
    pub fn max_deviation(&self) -> f64 {
        self.points
            .iter()
            .map(|p| {
                if p.deviation.is_nan() {
                    f64::INFINITY
                } else {
                    p.deviation
                }
            })
            .fold(0.0, f64::max)
    }

    /// Replaces the tolerance and records the change in the metadata.
    pub fn override_tolerance(&mut self, tolerance: f64) {
        let note = format!("{:e} -> {:e}", self.tolerance, tolerance);
        self.metadata.set("tolerance_override", note);
        self.tolerance = tolerance;
        self.passed = self.recompute_passed();
    }

    fn recompute_passed(&self) -> bool {
        self.max_deviation() <= self.tolerance
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "[{}] {}  max deviation {:.3e}  tolerance {:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.check_name,
            self.max_deviation(),
            self.tolerance
        )?;
        let width = self.points.iter().map(|p| p.input.len()).max().unwrap_or(0);
        for p in &self.points {
            writeln!(
                f,
                "    {:<width$}  expected {:>14.8e}  actual {:>14.8e}  dev {:>10.3e}",
                p.input, p.expected, p.actual, p.deviation
            )?;
        }
        for o in &self.observations {
            if o.note.is_empty() {
                writeln!(f, "    · {} = {:.6e}", o.label, o.value)?;
            } else {
                writeln!(f, "    · {} = {:.6e} ({})", o.label, o.value, o.note)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passed_tracks_max_deviation() {
        let mut r = VerificationReport::new("demo", 1e-3, Metadata::default());
        assert!(r.passed);
        r.push("a", 1.0, 1.0005, 5e-4);
        assert!(r.passed);
        r.push("b", 1.0, 1.1, 0.1);
        assert!(!r.passed);
        r.push("c", 1.0, f64::NAN, f64::NAN);
        assert!(r.max_deviation().is_infinite());
    }

    #[test]
    fn json_round_trip() {
        let mut meta = Metadata::with_params(1.5, 0.5);
        meta.seed = Some(7);
        meta.set("form", "RK");
        let mut r = VerificationReport::new("demo", 1e-9, meta);
        r.push("s=0.1", 1.0, 1.0, 0.0);
        r.observe("ks", 0.01, "seed 3");
        let back: VerificationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
