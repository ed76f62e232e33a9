//! Frequentist study engines: exact complete enumeration of 2×k tables with
//! fixed row totals, Monte Carlo simulation under a fitted model, and a
//! shrinkage scan of fitted probabilities.
//!
//! Every study fans out over independent work items (tables or replicates)
//! through [`crate::parallel`], caches estimator values once per item and
//! reduces deterministically in item order, so reports are reproducible for
//! a given seed regardless of thread count.

mod enumerate;
mod shrinkage;
mod simulate;

pub use enumerate::{
    alpha_pattern, enumerate_tables, run_enumeration, symmetry_check, table_probability,
    two_row_probabilities, Compositions, EnumConfig, EnumerationReport, SymmetryViolation,
    TableOutcome,
};
pub use shrinkage::{shrinkage_scan, ShrinkageConfig, ShrinkageRecord, ShrinkageReport};
pub use simulate::{run_simulation, SimulationConfig, SimulationReport};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Estimators compared by the studies. `El` is the closed-form empirical
/// logit difference, available for two response categories only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Estimator {
    Ml,
    Bc,
    Rb,
    El,
}

impl Estimator {
    pub fn token(self) -> &'static str {
        match self {
            Estimator::Ml => "ML",
            Estimator::Bc => "BC",
            Estimator::Rb => "RB",
            Estimator::El => "EL",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ML" => Ok(Estimator::Ml),
            "BC" => Ok(Estimator::Bc),
            "RB" => Ok(Estimator::Rb),
            "EL" => Ok(Estimator::El),
            other => Err(Error::InvalidData(format!("unknown estimator '{other}'"))),
        }
    }
}

/// Writes comma-separated values with a header row; numbers print in the
/// shortest round-trip form with a period decimal separator.
pub(crate) struct CsvBuilder {
    out: String,
}

impl CsvBuilder {
    pub fn new(header: &[&str]) -> Self {
        CsvBuilder {
            out: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.out.push_str(&fields.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

pub(crate) fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NA".to_string()
    } else {
        format!("{v}")
    }
}
