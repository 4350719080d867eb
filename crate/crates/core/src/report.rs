//! Violation reports shared by every checker.
//!
//! A report counts, per tag, how many instances were checked, how many were
//! skipped because an intermediate element left the configured window, and
//! how many were violated. Witnesses are kept in enumeration order, which is
//! deterministic because every window is enumerated in a fixed order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub checked: u64,
    pub skipped: u64,
    pub violated: u64,
    pub worst_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub tag: String,
    pub witness: String,
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub tallies: BTreeMap<String, Tally>,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl ViolationReport {
    pub fn new() -> Self {
        Self::default()
    }

    fn tally(&mut self, tag: &str) -> &mut Tally {
        self.tallies.entry(tag.to_string()).or_default()
    }

    /// Registers a tag with zero counts so that it shows up in summaries.
    pub fn touch(&mut self, tag: &str) {
        self.tally(tag);
    }

    pub fn pass(&mut self, tag: &str, residual: f64) {
        let t = self.tally(tag);
        t.checked += 1;
        if residual > t.worst_residual {
            t.worst_residual = residual;
        }
    }

    pub fn fail(&mut self, tag: &str, witness: impl Into<String>, residual: f64) {
        let t = self.tally(tag);
        t.checked += 1;
        t.violated += 1;
        if residual > t.worst_residual || residual.is_nan() {
            t.worst_residual = if residual.is_nan() { f64::INFINITY } else { residual };
        }
        self.violations.push(Violation {
            tag: tag.to_string(),
            witness: witness.into(),
            residual,
        });
    }

    pub fn skip(&mut self, tag: &str) {
        self.tally(tag).skipped += 1;
    }

    /// Records a residual against a tolerance. NaN counts as a violation.
    pub fn check<F: FnOnce() -> String>(&mut self, tag: &str, residual: f64, eps: f64, witness: F) -> bool {
        if residual <= eps {
            self.pass(tag, residual);
            true
        } else {
            self.fail(tag, witness(), residual);
            false
        }
    }

    /// Records a boolean outcome (residual 0 or 1).
    pub fn expect<F: FnOnce() -> String>(&mut self, tag: &str, ok: bool, witness: F) -> bool {
        if ok {
            self.pass(tag, 0.0);
        } else {
            self.fail(tag, witness(), 1.0);
        }
        ok
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn merge(&mut self, other: ViolationReport) {
        self.merge_prefixed("", other);
    }

    /// Merges another report, prefixing its tags (`prefix/tag`).
    pub fn merge_prefixed(&mut self, prefix: &str, other: ViolationReport) {
        let name = |tag: &str| {
            if prefix.is_empty() {
                tag.to_string()
            } else {
                format!("{prefix}/{tag}")
            }
        };
        for (tag, t) in other.tallies {
            let mine = self.tally(&name(&tag));
            mine.checked += t.checked;
            mine.skipped += t.skipped;
            mine.violated += t.violated;
            if t.worst_residual > mine.worst_residual {
                mine.worst_residual = t.worst_residual;
            }
        }
        for mut v in other.violations {
            v.tag = name(&v.tag);
            self.violations.push(v);
        }
        self.notes.extend(other.notes);
    }

    /// Merges another report under `prefix/`, prepending `context` to each
    /// witness.
    pub fn merge_context(&mut self, prefix: &str, context: &str, mut other: ViolationReport) {
        for v in &mut other.violations {
            v.witness = format!("{context}: {}", v.witness);
        }
        self.merge_prefixed(prefix, other);
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated_tags(&self) -> Vec<&str> {
        self.tallies.iter().filter(|(_, t)| t.violated > 0).map(|(k, _)| k.as_str()).collect()
    }

    pub fn has_violation(&self, tag: &str) -> bool {
        self.tallies.get(tag).is_some_and(|t| t.violated > 0)
    }

    pub fn total_checked(&self) -> u64 {
        self.tallies.values().map(|t| t.checked).sum()
    }

    pub fn total_skipped(&self) -> u64 {
        self.tallies.values().map(|t| t.skipped).sum()
    }

    pub fn worst_residual(&self) -> f64 {
        self.tallies.values().map(|t| t.worst_residual).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_merge() {
        let mut a = ViolationReport::new();
        a.check("X", 1e-12, 1e-9, || "x".into());
        a.check("X", 1e-3, 1e-9, || "bad".into());
        a.skip("X");
        let mut b = ViolationReport::new();
        b.expect("Y", true, String::new);
        b.merge_prefixed("sub", a);
        let t = &b.tallies["sub/X"];
        assert_eq!((t.checked, t.skipped, t.violated), (2, 1, 1));
        assert_eq!(b.violations[0].tag, "sub/X");
        assert!(!b.is_clean());
        assert!(b.has_violation("sub/X"));
        assert_eq!(b.total_checked(), 3);
    }

    #[test]
    fn nan_is_a_violation() {
        let mut r = ViolationReport::new();
        assert!(!r.check("N", f64::NAN, 1.0, || "nan".into()));
        assert!(r.tallies["N"].worst_residual.is_infinite());
    }
}
