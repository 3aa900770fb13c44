//! Structured pass/fail records shared by the relation suites and verifiers.

use serde::Serialize;

/// One relation family checked over all of its index instances.
#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub id: String,
    pub statement: String,
    /// `Some(true)` if every instance must hold, `Some(false)` if at least one
    /// instance must fail, `None` if the outcome is only recorded.
    pub expected: Option<bool>,
    pub instances: usize,
    pub failures: usize,
    pub max_residual: f64,
    pub failed_instances: Vec<String>,
}

impl RelationCheck {
    pub fn holds(&self) -> bool {
        self.failures == 0
    }

    pub fn as_expected(&self) -> bool {
        match self.expected {
            Some(true) => self.failures == 0,
            Some(false) => self.failures > 0,
            None => true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub tolerance: f64,
    pub checks: Vec<RelationCheck>,
}

impl VerificationReport {
    pub fn check(&self, id: &str) -> Option<&RelationCheck> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn total_failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn total_instances(&self) -> usize {
        self.checks.iter().map(|c| c.instances).sum()
    }

    /// Every check meets its expectation (including expected failures).
    pub fn pattern_ok(&self) -> bool {
        self.checks.iter().all(RelationCheck::as_expected)
    }
}

/// Generic check record: `{check, inputs, residual, tolerance, pass, details}`.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub inputs: serde_json::Value,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub details: serde_json::Value,
}
