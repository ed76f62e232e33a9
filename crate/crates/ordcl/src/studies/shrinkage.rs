//! Shrinkage scan: fitted category probabilities of the maximum likelihood
//! and reduced-bias estimators over every 2×k table with fixed row totals.

use super::{fmt_f64, CsvBuilder};
use crate::error::Result;
use crate::estimation::{fit_ml, fit_rb, FitControl, FitResult};
use crate::links::LinkFamily;
use crate::model::{
    build_design, merge_empty_categories, merge_interior_empty_categories, probabilities,
    ModelSpec, OrdinalData,
};
use crate::parallel;
use crate::studies::enumerate::enumerate_tables;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShrinkageConfig {
    pub k: usize,
    pub m1: u64,
    pub m2: u64,
    pub x1: f64,
    pub x2: f64,
    pub link: LinkFamily,
    pub control: FitControl,
    pub parallel: bool,
}

impl ShrinkageConfig {
    pub fn new(k: usize, m: u64, link: LinkFamily) -> Self {
        ShrinkageConfig {
            k,
            m1: m,
            m2: m,
            x1: -0.5,
            x2: 0.5,
            link,
            control: FitControl::default(),
            parallel: true,
        }
    }
}

/// Fitted probabilities of one table under both estimators, on the original
/// k categories (categories merged away during fitting report probability
/// zero).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShrinkageRecord {
    pub table_id: usize,
    pub counts: [Vec<u64>; 2],
    pub ml_diverged: bool,
    /// π̂ per row (x1 then x2), ML fit; absent when no model exists.
    pub pi_ml: Option<[Vec<f64>; 2]>,
    /// π̃ per row, reduced-bias fit.
    pub pi_rb: Option<[Vec<f64>; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShrinkageReport {
    pub config: ShrinkageConfig,
    pub records: Vec<ShrinkageRecord>,
    pub diagnostics: Vec<String>,
}

impl ShrinkageReport {
    /// One row per (table, covariate level, category).
    pub fn to_csv(&self) -> String {
        let mut csv = CsvBuilder::new(&[
            "table_id",
            "x_level",
            "category",
            "pi_ml",
            "pi_rb",
            "ml_diverged",
        ]);
        let levels = [self.config.x1, self.config.x2];
        for rec in &self.records {
            for (row, &x) in levels.iter().enumerate() {
                for s in 0..self.config.k {
                    let pi_ml = rec
                        .pi_ml
                        .as_ref()
                        .map_or(f64::NAN, |p| p[row][s]);
                    let pi_rb = rec
                        .pi_rb
                        .as_ref()
                        .map_or(f64::NAN, |p| p[row][s]);
                    csv.row(&[
                        rec.table_id.to_string(),
                        fmt_f64(x),
                        (s + 1).to_string(),
                        fmt_f64(pi_ml),
                        fmt_f64(pi_rb),
                        (rec.ml_diverged as u8).to_string(),
                    ]);
                }
            }
        }
        csv.finish()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// Fitted probabilities on the original category scale. A merge group maps
/// its fitted probability to its single observed member; the merged-away
/// empty categories report probability zero, matching the boundary fit they
/// compress.
fn expand_pi(
    fit: &FitResult,
    spec: &ModelSpec,
    merged: &OrdinalData,
    mapping: &[usize],
    original_totals: &[u64],
) -> Result<[Vec<f64>; 2]> {
    let k = mapping.len();
    let design = build_design(spec, merged)?;
    let probs = probabilities(spec, &design, &fit.delta_hat)?;
    let mut result = [vec![0.0; k], vec![0.0; k]];
    for slot in 0..spec.k {
        let members: Vec<usize> = (0..k).filter(|&s| mapping[s] == slot).collect();
        let owner = *members
            .iter()
            .find(|&&s| original_totals[s] > 0)
            .unwrap_or(&members[0]);
        for row in 0..2 {
            result[row][owner] = probs.pi[row][slot];
        }
    }
    Ok(result)
}

/// Fits every 2×k table with the given row totals by maximum likelihood and
/// bias reduction and records the fitted category probabilities.
pub fn shrinkage_scan(config: &ShrinkageConfig) -> Result<ShrinkageReport> {
    let tables: Vec<[Vec<u64>; 2]> =
        enumerate_tables(config.k, config.m1, config.m2).collect();
    let results = parallel::map_ordered(
        tables.into_iter().enumerate().collect(),
        config.parallel,
        |(table_id, counts)| scan_table(config, table_id, counts),
    );
    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    for (record, notes) in results {
        records.push(record);
        diagnostics.extend(notes);
    }
    Ok(ShrinkageReport {
        config: config.clone(),
        records,
        diagnostics,
    })
}

fn scan_table(
    config: &ShrinkageConfig,
    table_id: usize,
    counts: [Vec<u64>; 2],
) -> (ShrinkageRecord, Vec<String>) {
    let mut notes = Vec::new();
    let data = OrdinalData::from_counts(
        vec![vec![config.x1], vec![config.x2]],
        vec![counts[0].clone(), counts[1].clone()],
    )
    .expect("valid table data");

    let ml_diverged;
    let pi_ml = match merge_empty_categories(&data) {
        Ok((merged, mapping)) => {
            let spec = ModelSpec::proportional(config.link, merged.k(), 1);
            match fit_ml(&spec, &merged, &config.control) {
                Ok(fit) => {
                    ml_diverged = fit.has_diverging();
                    match expand_pi(&fit, &spec, &merged, &mapping, &data.category_totals()) {
                        Ok(pi) => Some(pi),
                        Err(e) => {
                            notes.push(format!("table {table_id}: ML probabilities: {e}"));
                            None
                        }
                    }
                }
                Err(e) => {
                    notes.push(format!("table {table_id}: ML fit failed: {e}"));
                    ml_diverged = true;
                    None
                }
            }
        }
        Err(_) => {
            ml_diverged = true;
            None
        }
    };

    let pi_rb = match merge_interior_empty_categories(&data) {
        Ok((merged, mapping)) => {
            let spec = ModelSpec::proportional(config.link, merged.k(), 1);
            match fit_rb(&spec, &merged, &config.control) {
                Ok(fit) => match expand_pi(&fit, &spec, &merged, &mapping, &data.category_totals()) {
                    Ok(pi) => Some(pi),
                    Err(e) => {
                        notes.push(format!("table {table_id}: RB probabilities: {e}"));
                        None
                    }
                },
                Err(e) => {
                    notes.push(format!("table {table_id}: RB fit failed: {e}"));
                    None
                }
            }
        }
        Err(e) => {
            notes.push(format!("table {table_id}: RB degenerate: {e}"));
            None
        }
    };

    (
        ShrinkageRecord {
            table_id,
            counts,
            ml_diverged,
            pi_ml,
            pi_rb,
        },
        notes,
    )
}
