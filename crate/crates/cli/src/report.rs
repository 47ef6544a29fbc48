//! Experiment reports.
//!
//! Every number in a report is labeled: quantities and operators are either
//! `exact` or `estimate` (the latter with a standard error, or the string
//! `"not-applicable"` when one cannot be formed), and every check echoes the
//! threshold it was judged against.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use pcsft_core::{ComplexOperator, McEstimate};
use serde::{Serialize, Serializer};
use serde_json::Value;

pub const NOT_APPLICABLE: &str = "not-applicable";

/// A standard error, or the marker for one that does not exist (one sample).
#[derive(Debug, Clone, PartialEq)]
pub enum Stderr<T> {
    Value(T),
    NotApplicable,
}

impl<T> From<Option<T>> for Stderr<T> {
    fn from(v: Option<T>) -> Self {
        v.map_or(Stderr::NotApplicable, Stderr::Value)
    }
}

impl<T: Serialize> Serialize for Stderr<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Stderr::Value(v) => v.serialize(s),
            Stderr::NotApplicable => s.serialize_str(NOT_APPLICABLE),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scalar {
    Exact { value: f64 },
    Estimate { value: f64, stderr: Stderr<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantity {
    pub name: String,
    #[serde(flatten)]
    pub value: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OperatorValue {
    Exact {
        entries: Vec<Vec<[f64; 2]>>,
    },
    Estimate {
        entries: Vec<Vec<[f64; 2]>>,
        stderr: Stderr<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorRecord {
    pub name: String,
    pub dim: usize,
    #[serde(flatten)]
    pub value: OperatorValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => NOT_APPLICABLE,
        }
    }
}

/// `value <= threshold`, or `not-applicable` when no threshold exists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: Stderr<f64>,
    pub comparison: &'static str,
    pub verdict: Verdict,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: Stderr::Value(threshold),
            comparison: "<=",
            // NaN never passes
            verdict: if value <= threshold {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
        }
    }

    pub fn not_applicable(name: &str, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: Stderr::NotApplicable,
            comparison: "<=",
            verdict: Verdict::NotApplicable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub quantities: Vec<Quantity>,
    pub operators: Vec<OperatorRecord>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            parameters: BTreeMap::new(),
            seed: None,
            n: None,
            quantities: Vec::new(),
            operators: Vec::new(),
            checks: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key.into(), value.into());
        self
    }

    pub fn exact(&mut self, name: &str, value: f64) -> &mut Self {
        self.quantities.push(Quantity {
            name: name.into(),
            value: Scalar::Exact { value },
        });
        self
    }

    pub fn estimate(&mut self, name: &str, e: &McEstimate) -> &mut Self {
        self.quantities.push(Quantity {
            name: name.into(),
            value: Scalar::Estimate {
                value: e.estimate,
                stderr: e.stderr.into(),
            },
        });
        self
    }

    pub fn exact_operator(&mut self, name: &str, op: &ComplexOperator) -> &mut Self {
        self.operators.push(OperatorRecord {
            name: name.into(),
            dim: op.nrows(),
            value: OperatorValue::Exact {
                entries: crate::io::encode_entries(op),
            },
        });
        self
    }

    pub fn estimated_operator(&mut self, name: &str, op: &ComplexOperator, stderr: Option<DMatrix<f64>>) -> &mut Self {
        let stderr = stderr.map(|m| (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect());
        self.operators.push(OperatorRecord {
            name: name.into(),
            dim: op.nrows(),
            value: OperatorValue::Estimate {
                entries: crate::io::encode_entries(op),
                stderr: stderr.into(),
            },
        });
        self
    }

    pub fn check(&mut self, check: Check) -> &mut Self {
        self.checks.push(check);
        self
    }

    /// Fixes the overall verdict: fail if any check fails.
    pub fn finish(mut self) -> Self {
        self.verdict = if self.checks.iter().any(|c| c.verdict == Verdict::Fail) {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    /// Flat tab-separated rows `name kind value stderr threshold verdict`
    /// for scalar quantities and checks.
    pub fn to_table(&self) -> String {
        let mut out = String::from("name\tkind\tvalue\tstderr\tthreshold\tverdict\n");
        for q in &self.quantities {
            let (kind, value, stderr) = match &q.value {
                Scalar::Exact { value } => ("exact", *value, String::new()),
                Scalar::Estimate { value, stderr } => ("estimate", *value, fmt_stderr(stderr)),
            };
            let _ = writeln!(out, "{}\t{kind}\t{value:e}\t{stderr}\t\t", q.name);
        }
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{}\tcheck\t{:e}\t\t{}\t{}",
                c.name,
                c.value,
                fmt_stderr(&c.threshold),
                c.verdict.as_str()
            );
        }
        let _ = writeln!(out, "verdict\tsummary\t\t\t\t{}", self.verdict.as_str());
        out
    }
}

fn fmt_stderr(s: &Stderr<f64>) -> String {
    match s {
        Stderr::Value(v) => format!("{v:e}"),
        Stderr::NotApplicable => NOT_APPLICABLE.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pcsft_core::linalg::pauli_x;

    #[test]
    fn labels_and_verdicts() {
        let mut r = Report::new("demo");
        r.param("z", 1).param("a", "x");
        r.exact("trace", 1.0);
        r.estimate("mean", &McEstimate::from_values([1.0]));
        r.exact_operator("x", &pauli_x());
        r.estimated_operator("y", &pauli_x(), None);
        r.check(Check::at_most("ok", 0.5, 1.0));
        r.check(Check::not_applicable("na", 0.5));
        let r = r.finish();
        assert!(r.passed());
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["quantities"][0]["kind"], "exact");
        assert_eq!(v["quantities"][1]["stderr"], NOT_APPLICABLE);
        assert_eq!(v["operators"][0]["kind"], "exact");
        assert_eq!(v["operators"][1]["stderr"], NOT_APPLICABLE);
        assert_eq!(v["operators"][0]["entries"][0][1], serde_json::json!([1.0, 0.0]));
        assert_eq!(v["checks"][0]["threshold"], 1.0);
        assert_eq!(v["checks"][1]["verdict"], NOT_APPLICABLE);
        // parameters serialize sorted
        let text = r.to_json();
        assert!(text.find("\"a\"").unwrap() < text.find("\"z\"").unwrap());
    }

    #[test]
    fn failing_and_nan_checks_fail_the_report() {
        let mut r = Report::new("demo");
        r.check(Check::at_most("nan", f64::NAN, 1.0));
        let r = r.finish();
        assert_eq!(r.verdict, Verdict::Fail);
        let table = r.to_table();
        assert!(table
            .lines()
            .any(|l| l.starts_with("nan\tcheck") && l.ends_with("fail")));
        assert!(table.ends_with("verdict\tsummary\t\t\t\tfail\n"));
    }
}
