//! Property checkers over zero traces and boundary moments, and the
//! difference constructions used for periodic and free-boundary problems.

mod checks;
mod difference;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use checks::{
    check_hypotheses, check_monotone, check_split_monotone, check_strict_drop, check_taxonomy, choose_split,
    isolated_sides, standard_checks, StandardChecks,
};
pub use difference::{build_reflection_difference, build_shift_difference, Difference};

/// One failed relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub time: f64,
    pub expected: String,
    pub observed: String,
}

/// Outcome of one checker. `passed` is true exactly when `violations` is
/// empty; `notes` carry diagnostics that do not affect the verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub violations: Vec<Violation>,
    pub params: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub(crate) fn new(name: &str, params: &[(&str, f64)]) -> Self {
        CheckReport {
            name: name.to_string(),
            passed: true,
            violations: Vec::new(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn violate(&mut self, time: f64, expected: impl Into<String>, observed: impl Into<String>) {
        self.violations.push(Violation { time, expected: expected.into(), observed: observed.into() });
        self.passed = false;
    }

    pub(crate) fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}] {}", if self.passed { "PASS" } else { "FAIL" }, self.name)?;
        if !self.params.is_empty() {
            let p: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(f, "  params: {}", p.join(", "))?;
        }
        for v in &self.violations {
            writeln!(f, "  violation t={}: expected {}; observed {}", v.time, v.expected, v.observed)?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}
