//! The JSON report document and its text rendering.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use zslab_core::ViolationReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteStatus {
    Pass,
    Fail,
    NotApplicable,
    Blocked,
}

/// Residuals are `null` when infinite or undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckTally {
    pub checked: u64,
    pub skipped: u64,
    pub violated: u64,
    pub worst_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub check: String,
    pub witness: String,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub status: SuiteStatus,
    pub checked: u64,
    pub skipped: u64,
    pub violated: u64,
    pub worst_residual: Option<f64>,
    pub checks: BTreeMap<String, CheckTally>,
    pub witnesses: Vec<Witness>,
    pub witnesses_omitted: u64,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowInfo {
    pub radius_p: usize,
    pub radius_g: usize,
    pub fock_ball: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub config_name: String,
    pub config_hash: String,
    pub windows: WindowInfo,
    pub tolerance: f64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
    pub wall_time_ms: u64,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl SuiteReport {
    pub fn from_violations(name: &str, rep: &ViolationReport, cap: usize) -> Self {
        let checks: BTreeMap<String, CheckTally> = rep
            .tallies
            .iter()
            .map(|(k, t)| {
                (
                    k.clone(),
                    CheckTally {
                        checked: t.checked,
                        skipped: t.skipped,
                        violated: t.violated,
                        worst_residual: finite(t.worst_residual),
                    },
                )
            })
            .collect();
        let violated = rep.tallies.values().map(|t| t.violated).sum();
        let witnesses: Vec<Witness> = rep
            .violations
            .iter()
            .take(cap)
            .map(|v| Witness {
                check: v.tag.clone(),
                witness: v.witness.clone(),
                residual: finite(v.residual),
            })
            .collect();
        SuiteReport {
            name: name.to_string(),
            status: if violated == 0 { SuiteStatus::Pass } else { SuiteStatus::Fail },
            checked: rep.total_checked(),
            skipped: rep.total_skipped(),
            violated,
            worst_residual: finite(rep.worst_residual()),
            checks,
            witnesses_omitted: (rep.violations.len() - witnesses.len()) as u64,
            witnesses,
            notes: rep.notes.clone(),
        }
    }

    pub fn without_checks(name: &str, status: SuiteStatus, note: impl Into<String>) -> Self {
        SuiteReport {
            name: name.to_string(),
            status,
            checked: 0,
            skipped: 0,
            violated: 0,
            worst_residual: Some(0.0),
            checks: BTreeMap::new(),
            witnesses: vec![],
            witnesses_omitted: 0,
            notes: vec![note.into()],
        }
    }
}

impl VerificationReport {
    /// The report with its wall time zeroed, for comparisons across runs.
    pub fn normalized(&self) -> Self {
        VerificationReport {
            wall_time_ms: 0,
            ..self.clone()
        }
    }
}

fn residual(r: Option<f64>) -> String {
    r.map_or_else(|| "inf".to_string(), |x| format!("{x:.2e}"))
}

pub fn render_text(r: &VerificationReport) -> String {
    let mut out = String::new();
    let w = &r.windows;
    let _ = writeln!(
        out,
        "{} (config {}, radius_p={}, radius_g={}, fock_ball={}, tolerance={:e})",
        r.config_name,
        &r.config_hash[..12.min(r.config_hash.len())],
        w.radius_p,
        w.radius_g,
        w.fock_ball,
        r.tolerance
    );
    for s in &r.suites {
        let status = match s.status {
            SuiteStatus::Pass => "PASS",
            SuiteStatus::Fail => "FAIL",
            SuiteStatus::NotApplicable => "n/a",
            SuiteStatus::Blocked => "BLOCKED",
        };
        let _ = writeln!(
            out,
            "  {status:<7} {:<14} checked={} skipped={} violated={} worst={}",
            s.name,
            s.checked,
            s.skipped,
            s.violated,
            residual(s.worst_residual)
        );
        for v in &s.witnesses {
            let _ = writeln!(out, "          {}: {} (residual {})", v.check, v.witness, residual(v.residual));
        }
        if s.witnesses_omitted > 0 {
            let _ = writeln!(out, "          ... {} more", s.witnesses_omitted);
        }
        for n in &s.notes {
            let _ = writeln!(out, "          note: {n}");
        }
    }
    let _ = writeln!(out, "{}", if r.passed { "all suites passed" } else { "violations found" });
    out
}
