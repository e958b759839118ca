//! Report emission. JSON output is canonical: keys sorted, two-space
//! indentation, trailing newline.

use std::fmt::Write as _;

use cstarcat::report::{Check, Report};
use cstarcat::Tolerances;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

pub fn canonical(v: &Value) -> String {
    // serde_json's map is ordered by key unless `preserve_order` is enabled
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize)]
struct CheckOut<'a> {
    name: &'a str,
    residual: Value,
    tolerance: f64,
    passed: bool,
    #[serde(skip_serializing_if = "str::is_empty")]
    detail: &'a str,
}

fn check_value(c: &Check) -> Value {
    let residual = if c.residual.is_finite() {
        json!(c.residual)
    } else {
        json!(c.residual.to_string())
    };
    serde_json::to_value(CheckOut {
        name: &c.name,
        residual,
        tolerance: c.tolerance,
        passed: c.passed,
        detail: &c.detail,
    })
    .expect("check serializes")
}

pub fn report_value(r: &Report) -> Value {
    json!({
        "title": r.title,
        "passed": r.passed(),
        "checks": r.checks.iter().map(check_value).collect::<Vec<_>>(),
    })
}

pub fn tolerances_value(t: &Tolerances) -> Value {
    json!({ "orth": t.orth, "mem": t.mem, "rank": t.rank, "max_dim": t.max_dim })
}

/// Everything a command produces: a summary, command-specific data, and
/// the verification reports.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub command: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub summary: Vec<String>,
    pub data: Value,
    pub reports: Vec<Report>,
}

impl CommandOutput {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(Report::passed)
    }

    pub fn to_json(&self) -> String {
        canonical(&json!({
            "command": self.command,
            "seed": self.seed,
            "tolerances": tolerances_value(&self.tolerances),
            "passed": self.passed(),
            "summary": self.summary,
            "result": self.data,
            "reports": self.reports.iter().map(report_value).collect::<Vec<_>>(),
        }))
    }

    pub fn to_text(&self) -> String {
        let t = &self.tolerances;
        let mut out = String::new();
        for line in &self.summary {
            let _ = writeln!(out, "{line}");
        }
        let _ = writeln!(
            out,
            "seed {}; tolerances: mem {:.1e}, rank {:.1e}, orth {:.1e}, max_dim {}",
            self.seed, t.mem, t.rank, t.orth, t.max_dim
        );
        for r in &self.reports {
            let _ = write!(out, "{r}");
        }
        let _ = writeln!(out, "{}", if self.passed() { "all checks passed" } else { "CHECKS FAILED" });
        out
    }

    pub fn emit(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Json => self.to_json().into_bytes(),
            Format::Text => self.to_text().into_bytes(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted() {
        let v = json!({"b": 1, "a": {"d": 2, "c": 3}});
        assert_eq!(canonical(&v), "{\n  \"a\": {\n    \"c\": 3,\n    \"d\": 2\n  },\n  \"b\": 1\n}\n");
    }

    #[test]
    fn checks_restate_tolerances() {
        let mut r = Report::new("t");
        r.push(Check::new("x", 1e-12, 1e-8));
        let out = CommandOutput {
            command: "k0".into(),
            seed: 3,
            tolerances: Tolerances::default(),
            summary: vec![],
            data: Value::Null,
            reports: vec![r],
        };
        let v: Value = serde_json::from_str(&out.to_json()).unwrap();
        assert_eq!(v["reports"][0]["checks"][0]["tolerance"], json!(1e-8));
        assert_eq!(v["tolerances"]["mem"], json!(1e-8));
        assert!(out.to_text().contains("[PASS] x"));
    }
}
