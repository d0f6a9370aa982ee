use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Closed form against the hyperbolic single sums.
    Series,
    /// Closed form against the brute-force lattice sum.
    Oracle,
    /// Two independent numerical routes for the same quantity.
    Matrix,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Series => "series",
            Route::Oracle => "oracle",
            Route::Matrix => "matrix",
        })
    }
}

/// One reading of a flagged entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub reading: String,
    #[serde(with = "f64_or_inf")]
    pub abs_diff: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub id: String,
    pub route: Route,
    pub lhs_value: String,
    pub rhs_value: String,
    /// Infinite when the evaluation failed.
    #[serde(with = "f64_or_inf")]
    pub abs_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// The reading that passed, for flagged entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reading: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<Candidate>,
    /// Oracle error estimate, already subtracted from `tolerance`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
    /// Evaluation error or failed side condition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub budget_exceeded: bool,
}

impl ReportRow {
    pub(crate) fn failed(id: &str, route: Route, tolerance: f64, err: &Error) -> Self {
        ReportRow {
            id: id.to_string(),
            route,
            lhs_value: String::new(),
            rhs_value: String::new(),
            abs_diff: f64::INFINITY,
            tolerance,
            pass: false,
            reading: None,
            candidates: Vec::new(),
            error_estimate: None,
            elapsed_ms: None,
            note: Some(err.to_string()),
            budget_exceeded: matches!(err, Error::Budget(_)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub precision_bits: u32,
    pub tol_series: f64,
    pub tol_oracle: f64,
    pub mode: String,
    pub budget: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: ReportConfig,
    pub summary: Summary,
    pub rows: Vec<ReportRow>,
}

/// JSON has no infinity, so it is written as the string `"inf"`.
mod f64_or_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str("inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got `{t}`"))),
        }
    }
}

fn sci(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:.3e}")
    }
}

impl VerificationReport {
    /// Rows are ordered by id, then route.
    pub fn new(config: ReportConfig, mut rows: Vec<ReportRow>) -> Self {
        rows.sort_by(|a, b| (&a.id, a.route).cmp(&(&b.id, b.route)));
        let passed = rows.iter().filter(|r| r.pass).count();
        VerificationReport {
            config,
            summary: Summary {
                total: rows.len(),
                passed,
                failed: rows.len() - passed,
            },
            rows,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn budget_exceeded(&self) -> bool {
        self.rows.iter().any(|r| r.budget_exceeded)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line(),
            field: String::new(),
            msg: e.to_string(),
        })
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from("| id | route | pass | abs_diff | tolerance | reading | lhs | rhs |\n");
        s.push_str("|---|---|---|---|---|---|---|---|\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} | {} |",
                r.id,
                r.route,
                if r.pass { "pass" } else { "FAIL" },
                sci(r.abs_diff),
                sci(r.tolerance),
                r.reading.as_deref().unwrap_or(""),
                r.lhs_value,
                r.note.as_deref().map(|n| format!("{} ({n})", r.rhs_value)).unwrap_or_else(|| r.rhs_value.clone()),
            );
        }
        let _ = writeln!(
            s,
            "\n{} checks, {} passed, {} failed",
            self.summary.total, self.summary.passed, self.summary.failed
        );
        s
    }

    pub fn to_csv(&self) -> String {
        let esc = |v: &str| {
            if v.contains([',', '"', '\n']) {
                format!("\"{}\"", v.replace('"', "\"\""))
            } else {
                v.to_string()
            }
        };
        let mut s = String::from("id,route,pass,abs_diff,tolerance,reading,error_estimate,lhs_value,rhs_value,note\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{:e},{:e},{},{},{},{},{}",
                esc(&r.id),
                r.route,
                r.pass,
                r.abs_diff,
                r.tolerance,
                r.reading.as_deref().unwrap_or(""),
                r.error_estimate.map(|e| format!("{e:e}")).unwrap_or_default(),
                esc(&r.lhs_value),
                esc(&r.rhs_value),
                esc(r.note.as_deref().unwrap_or("")),
            );
        }
        s
    }

    pub fn to_plain(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let _ = write!(
                s,
                "{:<4} {:<22} {:<6} diff {:>10} tol {:>10}",
                if r.pass { "ok" } else { "FAIL" },
                r.id,
                r.route.to_string(),
                sci(r.abs_diff),
                sci(r.tolerance),
            );
            if let Some(reading) = &r.reading {
                let _ = write!(s, " reading {reading}");
            }
            if let Some(note) = &r.note {
                let _ = write!(s, "  [{note}]");
            }
            s.push('\n');
        }
        let _ = writeln!(
            s,
            "{} checks, {} passed, {} failed",
            self.summary.total, self.summary.passed, self.summary.failed
        );
        s
    }
}
