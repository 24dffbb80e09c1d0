//! Verification reports: cases with residuals and tolerances, plus the
//! errata resolved while checking the formulas.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Warn,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub name: String,
    pub status: Status,
    pub residual: f64,
    pub tolerance: f64,
    pub notes: String,
}

impl Case {
    /// Pass iff `residual <= tolerance`. A non-finite residual fails and is
    /// stored as f64::MAX.
    pub fn check(name: impl Into<String>, residual: f64, tolerance: f64, notes: impl Into<String>) -> Case {
        let mut notes = notes.into();
        let (residual, status) = if residual.is_finite() {
            (residual, if residual <= tolerance { Status::Pass } else { Status::Fail })
        } else {
            notes = format!("non-finite residual ({residual}); {notes}");
            (f64::MAX, Status::Fail)
        };
        Case { name: name.into(), status, residual, tolerance, notes }
    }

    /// A case whose computation itself failed.
    pub fn error(name: impl Into<String>, tolerance: f64, err: impl std::fmt::Display) -> Case {
        Case {
            name: name.into(),
            status: Status::Fail,
            residual: f64::MAX,
            tolerance,
            notes: format!("error: {err}"),
        }
    }

    /// Recorded, not asserted: warn when over tolerance.
    pub fn advisory(name: impl Into<String>, residual: f64, tolerance: f64, notes: impl Into<String>) -> Case {
        let mut c = Case::check(name, residual, tolerance, notes);
        if c.status == Status::Fail {
            c.status = Status::Warn;
        }
        c
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Erratum {
    pub equation_label: String,
    pub as_printed: String,
    pub resolved_form: String,
    pub evidence: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    pub tol_scale: f64,
    pub cases: Vec<Case>,
    pub errata: Vec<Erratum>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, tol_scale: f64, mut cases: Vec<Case>, mut errata: Vec<Erratum>) -> Self {
        cases.sort_by(|a, b| a.name.cmp(&b.name));
        errata.sort_by(|a, b| a.equation_label.cmp(&b.equation_label));
        errata.dedup_by(|a, b| a.equation_label == b.equation_label);
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            suite: suite.into(),
            tol_scale,
            cases,
            errata,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.cases.iter().all(Case::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
