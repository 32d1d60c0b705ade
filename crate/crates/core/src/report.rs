//! Structured verification report and its text serialization.
//!
//! The report is written as TOML with every float printed to 17 significant
//! digits, so a parse of the emitted text reproduces the in-memory report
//! exactly. Layout:
//!
//! ```text
//! schema = "theta-lab-report/1"
//! fitted_c = ...
//! norm_direct = ...
//! final_ratio_to_pi = ...
//! claimed_ratio = 4.0...
//! agreement_with_claim = false
//! [config]                 key = "value" pairs echoing the run configuration
//! [[norm_from_residue]]    p, value
//! [[residue_candidates]]   p, displayed_constant, parseval_constant, fitted_constant, stated
//! [[checks]]               id, description, measured, expected (absent if null), tolerance, status
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const REPORT_SCHEMA: &str = "theta-lab-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Adjudicated,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Adjudicated => "adjudicated",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub description: String,
    pub measured: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    pub tolerance: f64,
    pub status: Status,
}

impl CheckResult {
    /// A check against a known value; passes iff `|measured - expected| <= tolerance`.
    pub fn compare(id: &str, description: &str, measured: f64, expected: f64, tolerance: f64) -> Self {
        let mut c = Self {
            id: id.to_string(),
            description: description.to_string(),
            measured,
            expected: Some(expected),
            tolerance,
            status: Status::Fail,
        };
        c.status = c.derived_status();
        c
    }

    /// A value the run itself determines, with no expected value.
    pub fn adjudicated(id: &str, description: &str, measured: f64) -> Self {
        Self {
            id: id.to_string(),
            description: description.to_string(),
            measured,
            expected: None,
            tolerance: 0.0,
            status: Status::Adjudicated,
        }
    }

    /// Status recomputed from `measured`, `expected` and `tolerance`.
    pub fn derived_status(&self) -> Status {
        match self.expected {
            None => Status::Adjudicated,
            Some(e) if (self.measured - e).abs() <= self.tolerance => Status::Pass,
            Some(_) => Status::Fail,
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormFromResidue {
    pub p: u64,
    pub value: f64,
}

/// Residue of `I_p` at `s = 1` under each reading of the Fourier constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueCandidateRow {
    pub p: u64,
    /// Closed form with constant 2.
    pub displayed_constant: f64,
    /// Closed form with constant 4.
    pub parseval_constant: f64,
    pub fitted_constant: f64,
    /// The claimed `2 (1 - 1/p)`.
    pub stated: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub fitted_c: f64,
    pub norm_direct: f64,
    pub final_ratio_to_pi: f64,
    pub claimed_ratio: f64,
    pub agreement_with_claim: bool,
    #[serde(default)]
    pub config: BTreeMap<String, String>,
    #[serde(default)]
    pub norm_from_residue: Vec<NormFromResidue>,
    #[serde(default)]
    pub residue_candidates: Vec<ResidueCandidateRow>,
    #[serde(default)]
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }
}

fn float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn string(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn key(k: &str) -> String {
    if !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        k.to_string()
    } else {
        string(k)
    }
}

/// Serializes a report in the layout described in the module docs.
pub fn render_report(report: &VerificationReport) -> String {
    let mut out = String::new();
    let w = &mut out;
    // writing to a String cannot fail
    let _ = writeln!(w, "schema = {}", string(&report.schema));
    let _ = writeln!(w, "fitted_c = {}", float(report.fitted_c));
    let _ = writeln!(w, "norm_direct = {}", float(report.norm_direct));
    let _ = writeln!(w, "final_ratio_to_pi = {}", float(report.final_ratio_to_pi));
    let _ = writeln!(w, "claimed_ratio = {}", float(report.claimed_ratio));
    let _ = writeln!(w, "agreement_with_claim = {}", report.agreement_with_claim);
    let _ = writeln!(w, "\n[config]");
    for (k, v) in &report.config {
        let _ = writeln!(w, "{} = {}", key(k), string(v));
    }
    for n in &report.norm_from_residue {
        let _ = writeln!(w, "\n[[norm_from_residue]]\np = {}\nvalue = {}", n.p, float(n.value));
    }
    for r in &report.residue_candidates {
        let _ = writeln!(
            w,
            "\n[[residue_candidates]]\np = {}\ndisplayed_constant = {}\nparseval_constant = {}\nfitted_constant = {}\nstated = {}",
            r.p,
            float(r.displayed_constant),
            float(r.parseval_constant),
            float(r.fitted_constant),
            float(r.stated)
        );
    }
    for c in &report.checks {
        let _ = writeln!(w, "\n[[checks]]");
        let _ = writeln!(w, "id = {}", string(&c.id));
        let _ = writeln!(w, "description = {}", string(&c.description));
        let _ = writeln!(w, "measured = {}", float(c.measured));
        if let Some(e) = c.expected {
            let _ = writeln!(w, "expected = {}", float(e));
        }
        let _ = writeln!(w, "tolerance = {}", float(c.tolerance));
        let _ = writeln!(w, "status = {}", string(&c.status.to_string()));
    }
    out
}

pub fn parse_report(text: &str) -> Result<VerificationReport> {
    toml::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed report: {e}")))
}

pub fn emit_report(report: &VerificationReport, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, render_report(report))
}

pub fn read_report(path: &Path) -> Result<VerificationReport> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_report(&text)
}
