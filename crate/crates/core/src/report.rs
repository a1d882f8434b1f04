//! Pass/fail bookkeeping for identity suites.

use crate::field::{Elem, FieldError};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    /// Records lhs == rhs; a failed division on either side is a failure.
    pub fn equal(&mut self, label: impl FnOnce() -> String, lhs: Result<Elem, FieldError>, rhs: Result<Elem, FieldError>) {
        self.checked += 1;
        match (lhs, rhs) {
            (Ok(l), Ok(r)) if l == r => {}
            (Ok(l), Ok(r)) => self.failures.push(format!("{}: {l} != {r}", label())),
            (Err(e), _) | (_, Err(e)) => self.failures.push(format!("{}: {e}", label())),
        }
    }

    pub fn absorb(&mut self, other: Report, prefix: &str) {
        self.checked += other.checked;
        self.failures.extend(other.failures.into_iter().map(|f| format!("{prefix}{f}")));
    }
}
