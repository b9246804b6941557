//! Check reports shared by the axiom checkers, transforms and the CLI.

use serde::Serialize;

use crate::freealg::{Element, TensorElement};
use crate::series::HSeries;

/// The residual left over by a failed comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Discrepancy {
    Element(Element),
    Tensor(TensorElement),
    Series(HSeries),
    Text(String),
}

/// One performed check, passing or not.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckEntry {
    pub axiom: String,
    pub subject: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<Discrepancy>,
}

impl CheckEntry {
    pub fn pass(axiom: impl Into<String>, subject: impl Into<String>) -> Self {
        CheckEntry {
            axiom: axiom.into(),
            subject: subject.into(),
            pass: true,
            discrepancy: None,
        }
    }

    pub fn fail(axiom: impl Into<String>, subject: impl Into<String>, d: Discrepancy) -> Self {
        CheckEntry {
            axiom: axiom.into(),
            subject: subject.into(),
            pass: false,
            discrepancy: Some(d),
        }
    }

    /// Passes iff `residual` is zero; otherwise records it.
    pub fn from_element(axiom: &str, subject: &str, residual: Element) -> Self {
        if residual.is_zero() {
            Self::pass(axiom, subject)
        } else {
            Self::fail(axiom, subject, Discrepancy::Element(residual))
        }
    }

    pub fn from_tensor(axiom: &str, subject: &str, residual: TensorElement) -> Self {
        if residual.is_zero() {
            Self::pass(axiom, subject)
        } else {
            Self::fail(axiom, subject, Discrepancy::Tensor(residual))
        }
    }

    pub fn from_series(axiom: &str, subject: &str, residual: HSeries) -> Self {
        if residual.is_zero() {
            Self::pass(axiom, subject)
        } else {
            Self::fail(axiom, subject, Discrepancy::Series(residual))
        }
    }

    pub fn from_bool(axiom: &str, subject: &str, ok: bool, why: impl FnOnce() -> String) -> Self {
        if ok {
            Self::pass(axiom, subject)
        } else {
            Self::fail(axiom, subject, Discrepancy::Text(why()))
        }
    }
}

/// Every check performed by an operation, in a deterministic order.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct HopfReport {
    pub checked_axioms: Vec<CheckEntry>,
}

impl HopfReport {
    pub fn new(checked_axioms: Vec<CheckEntry>) -> Self {
        HopfReport { checked_axioms }
    }

    pub fn passed(&self) -> bool {
        self.checked_axioms.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.checked_axioms.iter().filter(|c| !c.pass)
    }

    pub fn len(&self) -> usize {
        self.checked_axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checked_axioms.is_empty()
    }

    pub fn push(&mut self, e: CheckEntry) {
        self.checked_axioms.push(e);
    }

    pub fn extend(&mut self, other: HopfReport) {
        self.checked_axioms.extend(other.checked_axioms);
    }

    /// Prefixes every axiom name, for merged reports.
    pub fn tagged(mut self, prefix: &str) -> Self {
        for c in &mut self.checked_axioms {
            c.axiom = format!("{prefix}{}", c.axiom);
        }
        self
    }
}
