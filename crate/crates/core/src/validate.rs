//! Violation reporting shared by all validators.
//!
//! Validators never panic on bad structures: they return every failed axiom
//! as data, with a human-readable witness and an approximate residual
//! magnitude (1.0 for purely structural failures in exact mode).

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct Violation {
    /// Which axiom failed, e.g. "associativity".
    pub rule: String,
    /// Where, e.g. "(i,j,k)=(0,2,1)".
    pub witness: String,
    /// Approximate size of the residual.
    pub magnitude: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at {} (magnitude {:.3e})",
            self.rule, self.witness, self.magnitude
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, rule: impl Into<String>, witness: impl Into<String>, magnitude: f64) {
        self.violations.push(Violation {
            rule: rule.into(),
            witness: witness.into(),
            magnitude,
        });
    }

    /// Record a violation when the residual matrix is nonzero.
    pub fn check_zero<S: Scalar>(
        &mut self,
        rule: &str,
        witness: impl Into<String>,
        residual: &Mat<S>,
    ) {
        if !residual.is_zero() {
            self.push(rule, witness, residual.max_abs());
        }
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    /// Turn a failed report into an error (first violation as summary).
    pub fn require(self, context: &str) -> Result<()> {
        if self.ok() {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "{context}: {} violation(s), first: {}",
                self.violations.len(),
                self.violations[0]
            )))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            write!(f, "all axioms hold")
        } else {
            writeln!(f, "{} violation(s):", self.violations.len())?;
            for v in &self.violations {
                writeln!(f, "  {v}")?;
            }
            Ok(())
        }
    }
}
