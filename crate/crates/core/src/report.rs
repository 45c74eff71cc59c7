//! Pass/fail records produced by the axiom checkers.

use serde::Serialize;

/// Inputs and the two sides of a failed check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub inputs: Vec<String>,
    pub expected: String,
    pub actual: String,
}

/// Outcome of checking one axiom over all samples; `witness` holds the
/// first violation, if any.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl AxiomReport {
    pub fn new(axiom: impl Into<String>) -> Self {
        Self { axiom: axiom.into(), passed: true, witness: None }
    }

    /// Records `ok`; the first failure keeps its witness.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Witness) {
        if !ok && self.passed {
            self.passed = false;
            self.witness = Some(witness());
        }
    }
}

pub fn all_passed(reports: &[AxiomReport]) -> bool {
    reports.iter().all(|r| r.passed)
}
