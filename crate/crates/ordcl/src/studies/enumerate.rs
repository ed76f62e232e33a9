//! Exact complete enumeration of 2×k contingency tables with fixed row
//! totals.
//!
//! Estimator values depend only on the observed table, not on the true
//! parameters, so every table is fitted exactly once and the (β, e) grid is
//! evaluated by reweighting the cached fits with exact table probabilities.

use super::{fmt_f64, CsvBuilder, Estimator};
use crate::error::{Error, Result};
use crate::estimation::{
    bias_correct_ml, fit_ml, fit_rb, BoundaryFlag, FitControl, FitResult,
};
use crate::inference::{gen_emp_logit_2x2, gen_emp_logit_2x2_variance};
use crate::links::{self, LinkFamily};
use crate::model::{
    merge_empty_categories, merge_interior_empty_categories, ModelSpec, OrdinalData,
};
use crate::parallel;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// Iterator over the compositions of `m` into `k` non-negative parts in
/// lexicographic order, starting at (0, ..., 0, m) and ending at
/// (m, 0, ..., 0).
#[derive(Debug, Clone)]
pub struct Compositions {
    next: Option<Vec<u64>>,
}

impl Compositions {
    pub fn new(m: u64, k: usize) -> Self {
        assert!(k >= 1, "need at least one part");
        let mut first = vec![0; k];
        first[k - 1] = m;
        Compositions { next: Some(first) }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.next.take()?;
        let k = current.len();
        // Lexicographic successor: bump the position left of the last
        // non-zero entry and push the remaining tail mass to the end.
        if let Some(last_nonzero) = (0..k).rev().find(|&i| current[i] > 0) {
            if last_nonzero > 0 {
                let mut succ = current.clone();
                let tail: u64 = succ[last_nonzero..].iter().sum();
                succ[last_nonzero - 1] += 1;
                for v in succ[last_nonzero..].iter_mut() {
                    *v = 0;
                }
                succ[k - 1] = tail - 1;
                self.next = Some(succ);
            }
        }
        Some(current)
    }
}

/// All 2×k tables with row totals (m1, m2): every pair of compositions,
/// outer row first, in lexicographic order.
pub fn enumerate_tables(k: usize, m1: u64, m2: u64) -> impl Iterator<Item = [Vec<u64>; 2]> {
    Compositions::new(m1, k).flat_map(move |top| {
        Compositions::new(m2, k).map(move |bottom| [top.clone(), bottom])
    })
}

/// Category probabilities of the two rows of model γ_rs = G(α_s − βx_r) at
/// covariate levels x1 and x2.
pub fn two_row_probabilities(
    link: LinkFamily,
    alpha: &[f64],
    beta: f64,
    x1: f64,
    x2: f64,
) -> Result<[Vec<f64>; 2]> {
    let q = alpha.len();
    let mut rows = [vec![0.0; q + 1], vec![0.0; q + 1]];
    for (row, &x) in rows.iter_mut().zip(&[x1, x2]) {
        let mut prev = 0.0;
        for s in 0..q {
            let eta = alpha[s] - beta * x;
            if s > 0 && alpha[s] <= alpha[s - 1] {
                return Err(Error::InvalidParameter {
                    row: 0,
                    category: s + 1,
                });
            }
            let gamma = links::cdf(link, eta)?;
            row[s] = (gamma - prev).max(0.0);
            prev = gamma;
        }
        row[q] = (1.0 - prev).max(0.0);
    }
    Ok(rows)
}

fn ln_multinomial_coef(y: &[u64]) -> f64 {
    let m: u64 = y.iter().sum();
    ln_gamma(m as f64 + 1.0) - y.iter().map(|&c| ln_gamma(c as f64 + 1.0)).sum::<f64>()
}

fn ln_row_probability(y: &[u64], pi: &[f64]) -> Option<f64> {
    let mut log_p = ln_multinomial_coef(y);
    for (&c, &prob) in y.iter().zip(pi) {
        if c > 0 {
            if prob <= 0.0 {
                return None;
            }
            log_p += c as f64 * prob.ln();
        }
    }
    Some(log_p)
}

/// Product-multinomial probability of a 2×k table under given row category
/// probabilities. Row log-probabilities are evaluated separately and added
/// once, so swapping the two rows gives the bit-identical probability.
pub fn table_probability(counts: &[Vec<u64>; 2], pi: &[Vec<f64>; 2]) -> f64 {
    match (
        ln_row_probability(&counts[0], &pi[0]),
        ln_row_probability(&counts[1], &pi[1]),
    ) {
        (Some(a), Some(b)) => (a + b).exp(),
        _ => 0.0,
    }
}

/// Configuration of the complete enumeration study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnumConfig {
    pub k: usize,
    pub m1: u64,
    pub m2: u64,
    pub x1: f64,
    pub x2: f64,
    pub link: LinkFamily,
    pub beta_grid: Vec<f64>,
    /// Cutpoint scale values: α_s = e·(s − 2), i.e. e·(−1, 0, 1, ...).
    pub e_values: Vec<f64>,
    pub estimators: Vec<Estimator>,
    pub ci_level: f64,
    pub control: FitControl,
    /// Refit tables labelled infinite under a stricter criterion and check
    /// that the labelled estimates diverge further.
    pub verify_divergence: bool,
    #[serde(default = "default_true")]
    pub parallel: bool,
}

fn default_true() -> bool {
    true
}

impl EnumConfig {
    pub fn new(k: usize, m: u64, link: LinkFamily) -> Self {
        EnumConfig {
            k,
            m1: m,
            m2: m,
            x1: -0.5,
            x2: 0.5,
            link,
            beta_grid: equispaced(-6.0, 6.0, 50),
            e_values: vec![1.0, 2.0, 3.0, 5.0, 7.0],
            estimators: vec![Estimator::Ml, Estimator::Bc, Estimator::Rb],
            ci_level: 0.95,
            control: FitControl::default(),
            verify_divergence: false,
            parallel: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidConfig("k must be at least 2".into()));
        }
        if self.m1 < 1 || self.m2 < 1 {
            return Err(Error::InvalidConfig("row totals must be positive".into()));
        }
        if self.beta_grid.is_empty() || self.beta_grid.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidConfig("beta grid must be finite".into()));
        }
        if self.e_values.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::InvalidConfig(
                "cutpoint scale values must be positive".into(),
            ));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidConfig("no estimators requested".into()));
        }
        if self.estimators.contains(&Estimator::El) && self.k != 2 {
            return Err(Error::InvalidConfig(
                "the empirical-logit estimator is only available for k = 2".into(),
            ));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::InvalidConfig("ci level outside (0, 1)".into()));
        }
        Ok(())
    }
}

/// Equi-spaced grid of `n` points on [lo, hi].
pub fn equispaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n as f64 - 1.0))
        .collect()
}

/// Cutpoints α_s = e·(s − 2) for s = 1..q: the e·(−1, 0, 1, ...) pattern.
pub fn alpha_pattern(q: usize, e: f64) -> Vec<f64> {
    (1..=q).map(|s| e * (s as f64 - 2.0)).collect()
}

/// One estimator's value on one table.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EstimateCell {
    pub beta: f64,
    pub se: f64,
    /// No finite estimate exists (or the fit was labelled infinite).
    pub diverged: bool,
}

/// Cached per-table estimates for all requested estimators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableOutcome {
    pub counts: [Vec<u64>; 2],
    pub estimates: Vec<EstimateCell>,
    /// Log multinomial coefficients of the two rows, cached for the
    /// probability reweighting.
    ln_coefs: [f64; 2],
}

/// Exact metrics of one estimator in one (β, e) cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimatorMetrics {
    pub estimator: Estimator,
    /// Probability of an infinite estimate.
    pub p_infinite: f64,
    /// Probability of the conditioning event (finite estimate).
    pub p_finite: f64,
    /// Bias of the β estimate; conditional on finiteness for ML and BC.
    pub bias: f64,
    /// Mean squared error; conditional for ML and BC.
    pub mse: f64,
    /// Wald interval coverage, with the (−∞, ∞) convention for infinite ML
    /// and BC estimates.
    pub coverage: f64,
}

/// All estimator metrics at one parameter setting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellMetrics {
    pub beta: f64,
    pub e: f64,
    pub metrics: Vec<EstimatorMetrics>,
}

/// Full enumeration study output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub config: EnumConfig,
    pub table_count: usize,
    pub cells: Vec<CellMetrics>,
    /// Per-table problems (failed fits, divergence-verification anomalies).
    pub diagnostics: Vec<String>,
}

impl EnumerationReport {
    /// One row per (β, e, estimator) cell.
    pub fn to_csv(&self) -> String {
        let mut csv = CsvBuilder::new(&[
            "beta",
            "e",
            "estimator",
            "p_infinite",
            "p_finite",
            "bias",
            "mse",
            "coverage",
        ]);
        for cell in &self.cells {
            for m in &cell.metrics {
                csv.row(&[
                    fmt_f64(cell.beta),
                    fmt_f64(cell.e),
                    m.estimator.to_string(),
                    fmt_f64(m.p_infinite),
                    fmt_f64(m.p_finite),
                    fmt_f64(m.bias),
                    fmt_f64(m.mse),
                    fmt_f64(m.coverage),
                ]);
            }
        }
        csv.finish()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn cell(&self, beta: f64, e: f64) -> Option<&CellMetrics> {
        self.cells
            .iter()
            .find(|c| (c.beta - beta).abs() < 1e-12 && (c.e - e).abs() < 1e-12)
    }
}

impl CellMetrics {
    pub fn estimator(&self, which: Estimator) -> Option<&EstimatorMetrics> {
        self.metrics.iter().find(|m| m.estimator == which)
    }
}

fn beta_cell_from_fit(fit: &FitResult) -> EstimateCell {
    let d = fit.d();
    let beta = fit.delta_hat.as_slice()[d - 1];
    let se = fit.se()[d - 1];
    EstimateCell {
        beta,
        se,
        diverged: fit.boundary_flags[d - 1] == BoundaryFlag::Diverging,
    }
}

fn diverged_cell() -> EstimateCell {
    EstimateCell {
        beta: f64::NAN,
        se: f64::NAN,
        diverged: true,
    }
}

struct TableFits {
    outcome: TableOutcome,
    notes: Vec<String>,
}

/// Fits all requested estimators on one table. Maximum likelihood and bias
/// correction run on the fully merged table (slope estimates are invariant
/// to merging unobserved categories); bias reduction merges interior empty
/// categories only, keeping the finite end-cutpoint behaviour.
fn fit_table(config: &EnumConfig, table_id: usize, counts: [Vec<u64>; 2]) -> TableFits {
    let mut notes = Vec::new();
    let ln_coefs = [
        ln_multinomial_coef(&counts[0]),
        ln_multinomial_coef(&counts[1]),
    ];
    let data = OrdinalData::from_counts(
        vec![vec![config.x1], vec![config.x2]],
        vec![counts[0].clone(), counts[1].clone()],
    )
    .expect("valid table data");

    let mut ml_fit: Option<(FitResult, OrdinalData, ModelSpec)> = None;
    let mut estimates = Vec::with_capacity(config.estimators.len());

    for &estimator in &config.estimators {
        let cell = match estimator {
            Estimator::Ml | Estimator::Bc => {
                if ml_fit.is_none() {
                    ml_fit = match merge_empty_categories(&data) {
                        Ok((merged, _)) => {
                            let spec =
                                ModelSpec::proportional(config.link, merged.k(), 1);
                            match fit_ml(&spec, &merged, &config.control) {
                                Ok(fit) => Some((fit, merged, spec)),
                                Err(e) => {
                                    notes.push(format!("table {table_id}: ML fit failed: {e}"));
                                    None
                                }
                            }
                        }
                        Err(_) => {
                            // A single observed category identifies no slope.
                            None
                        }
                    };
                }
                match (&ml_fit, estimator) {
                    (None, _) => diverged_cell(),
                    (Some((fit, _, _)), Estimator::Ml) => beta_cell_from_fit(fit),
                    (Some((fit, merged, spec)), Estimator::Bc) => {
                        if fit.has_boundary() {
                            diverged_cell()
                        } else {
                            match crate::model::build_design(spec, merged).and_then(|design| {
                                bias_correct_ml(spec, &design, merged, &config.control, fit)
                            }) {
                                Ok(bc) => beta_cell_from_fit(&bc),
                                Err(e) => {
                                    notes.push(format!(
                                        "table {table_id}: BC correction failed: {e}"
                                    ));
                                    diverged_cell()
                                }
                            }
                        }
                    }
                    _ => unreachable!(),
                }
            }
            Estimator::Rb => {
                let rb_input = merge_interior_empty_categories(&data);
                let fitted = match &rb_input {
                    Ok((merged, _)) => {
                        let spec = ModelSpec::proportional(config.link, merged.k(), 1);
                        fit_rb(&spec, merged, &config.control)
                    }
                    Err(_) => {
                        // Single observed category: fit the raw table, the
                        // end adjustments keep everything finite.
                        let spec = ModelSpec::proportional(config.link, data.k(), 1);
                        fit_rb(&spec, &data, &config.control)
                    }
                };
                match fitted {
                    Ok(fit) => beta_cell_from_fit(&fit),
                    Err(e) => {
                        notes.push(format!("table {table_id}: RB fit failed: {e}"));
                        diverged_cell()
                    }
                }
            }
            Estimator::El => {
                let scale = config.x2 - config.x1;
                match gen_emp_logit_2x2(counts[0][0], config.m1, counts[1][0], config.m2) {
                    Ok(diff) => EstimateCell {
                        beta: diff / scale,
                        se: gen_emp_logit_2x2_variance(
                            counts[0][0],
                            config.m1,
                            counts[1][0],
                            config.m2,
                        )
                        .sqrt()
                            / scale.abs(),
                        diverged: false,
                    },
                    Err(e) => {
                        notes.push(format!("table {table_id}: EL failed: {e}"));
                        diverged_cell()
                    }
                }
            }
        };
        estimates.push(cell);
    }

    // Second-pass protocol: estimates labelled infinite must keep diverging
    // under a stricter criterion, finite ones must stay put.
    if config.verify_divergence {
        if let Some((fit, merged, spec)) = &ml_fit {
            let strict = FitControl {
                grad_tol: config.control.grad_tol / 100.0,
                max_iter: config.control.max_iter * 2,
                ..config.control.clone()
            };
            if let Ok(refit) = fit_ml(spec, merged, &strict) {
                let d = fit.d();
                let before = fit.delta_hat.as_slice()[d - 1];
                let after = refit.delta_hat.as_slice()[d - 1];
                let labelled = fit.boundary_flags[d - 1] == BoundaryFlag::Diverging;
                if labelled && after.abs() <= before.abs() {
                    notes.push(format!(
                        "table {table_id}: labelled infinite but did not diverge further \
                         ({before} -> {after})"
                    ));
                }
                if !labelled && (after - before).abs() > 1e-6 {
                    notes.push(format!(
                        "table {table_id}: labelled finite but moved under stricter \
                         criterion ({before} -> {after})"
                    ));
                }
            }
        }
    }

    TableFits {
        outcome: TableOutcome {
            counts,
            estimates,
            ln_coefs,
        },
        notes,
    }
}

/// Runs the complete enumeration study: fits every table once, then computes
/// exact expectations for every (β, e) cell by probability reweighting.
pub fn run_enumeration(config: &EnumConfig) -> Result<EnumerationReport> {
    config.validate()?;
    let tables: Vec<[Vec<u64>; 2]> = enumerate_tables(config.k, config.m1, config.m2).collect();
    let table_count = tables.len();

    let fits = parallel::map_ordered(
        tables.into_iter().enumerate().collect(),
        config.parallel,
        |(table_id, counts)| fit_table(config, table_id, counts),
    );
    let mut diagnostics = Vec::new();
    let mut outcomes = Vec::with_capacity(table_count);
    for fit in fits {
        diagnostics.extend(fit.notes);
        outcomes.push(fit.outcome);
    }

    let z = links::normal_quantile(1.0 - (1.0 - config.ci_level) / 2.0)?;
    let mut grid = Vec::new();
    for &e in &config.e_values {
        for &beta in &config.beta_grid {
            grid.push((beta, e));
        }
    }
    let cells = parallel::map_ordered(grid, config.parallel, |(beta, e)| {
        cell_metrics(config, &outcomes, beta, e, z)
    });
    let mut report = EnumerationReport {
        config: config.clone(),
        table_count,
        cells: Vec::new(),
        diagnostics,
    };
    for cell in cells {
        match cell {
            Ok(c) => report.cells.push(c),
            Err(e) => report.diagnostics.push(format!("cell failed: {e}")),
        }
    }
    Ok(report)
}

fn cell_metrics(
    config: &EnumConfig,
    outcomes: &[TableOutcome],
    beta: f64,
    e: f64,
    z: f64,
) -> Result<CellMetrics> {
    let alpha = alpha_pattern(config.k - 1, e);
    let pi = two_row_probabilities(config.link, &alpha, beta, config.x1, config.x2)?;
    let log_pi: [Vec<f64>; 2] = [
        pi[0].iter().map(|&p| p.max(f64::MIN_POSITIVE).ln()).collect(),
        pi[1].iter().map(|&p| p.max(f64::MIN_POSITIVE).ln()).collect(),
    ];

    let n_est = config.estimators.len();
    let mut p_inf = vec![0.0; n_est];
    let mut p_fin = vec![0.0; n_est];
    let mut bias = vec![0.0; n_est];
    let mut mse = vec![0.0; n_est];
    let mut cover = vec![0.0; n_est];

    for outcome in outcomes {
        // Per-row log-probabilities summed once: exactly symmetric under a
        // row swap, which makes the Theorem-1 cancellations at β = 0 exact.
        let mut row_lp = [0.0_f64; 2];
        let mut impossible = false;
        for (row, (y, (lp, p))) in outcome
            .counts
            .iter()
            .zip(log_pi.iter().zip(&pi))
            .enumerate()
        {
            let mut acc = outcome.ln_coefs[row];
            for ((&c, &l), &prob) in y.iter().zip(lp).zip(p) {
                if c > 0 {
                    if prob <= 0.0 {
                        impossible = true;
                    }
                    acc += c as f64 * l;
                }
            }
            row_lp[row] = acc;
        }
        if impossible {
            continue;
        }
        let prob = (row_lp[0] + row_lp[1]).exp();
        if prob == 0.0 {
            continue;
        }
        for (j, est) in outcome.estimates.iter().enumerate() {
            if est.diverged {
                p_inf[j] += prob;
                // Infinite ML/BC estimates take the (−∞, ∞) interval.
                cover[j] += prob;
            } else {
                p_fin[j] += prob;
                let err = est.beta - beta;
                bias[j] += prob * err;
                mse[j] += prob * err * err;
                if (est.beta - z * est.se) <= beta && beta <= (est.beta + z * est.se) {
                    cover[j] += prob;
                }
            }
        }
    }

    let metrics = config
        .estimators
        .iter()
        .enumerate()
        .map(|(j, &estimator)| {
            let conditional = matches!(estimator, Estimator::Ml | Estimator::Bc);
            let denom = if conditional && p_fin[j] > 0.0 {
                p_fin[j]
            } else {
                1.0
            };
            EstimatorMetrics {
                estimator,
                p_infinite: p_inf[j],
                p_finite: p_fin[j],
                bias: bias[j] / denom,
                mse: mse[j] / denom,
                coverage: cover[j],
            }
        })
        .collect();

    Ok(CellMetrics { beta, e, metrics })
}

/// A Theorem-1 symmetry violation in an enumeration report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetryViolation {
    pub beta: f64,
    pub e: f64,
    pub estimator: Estimator,
    pub metric: &'static str,
    pub discrepancy: f64,
}

/// Checks the bias antisymmetry, mean-squared-error symmetry and coverage
/// symmetry of an equal-row-total enumeration report across β and −β.
/// Returns the empty list when every paired cell agrees within `tol`.
pub fn symmetry_check(report: &EnumerationReport, tol: f64) -> Vec<SymmetryViolation> {
    let mut violations = Vec::new();
    if report.config.m1 != report.config.m2 {
        return violations;
    }
    for cell in &report.cells {
        if cell.beta < 0.0 {
            continue;
        }
        let Some(mirror) = report.cell(-cell.beta, cell.e) else {
            continue;
        };
        for (m, mm) in cell.metrics.iter().zip(&mirror.metrics) {
            let checks = [
                ("bias", (m.bias + mm.bias).abs()),
                ("mse", (m.mse - mm.mse).abs()),
                ("coverage", (m.coverage - mm.coverage).abs()),
                ("p_infinite", (m.p_infinite - mm.p_infinite).abs()),
            ];
            for (metric, discrepancy) in checks {
                if discrepancy > tol {
                    violations.push(SymmetryViolation {
                        beta: cell.beta,
                        e: cell.e,
                        estimator: m.estimator,
                        metric,
                        discrepancy,
                    });
                }
            }
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_counts() {
        assert_eq!(Compositions::new(3, 4).count(), 20);
        assert_eq!(Compositions::new(5, 4).count(), 56);
        assert_eq!(Compositions::new(1, 2).count(), 2);
        assert_eq!(enumerate_tables(4, 3, 3).count(), 400);
        assert_eq!(enumerate_tables(4, 5, 5).count(), 3136);
        assert_eq!(enumerate_tables(2, 1, 1).count(), 4);
    }

    #[test]
    fn compositions_are_lexicographic_and_unique() {
        let all: Vec<Vec<u64>> = Compositions::new(3, 3).collect();
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![0, 0, 3]);
        assert_eq!(all[all.len() - 1], vec![3, 0, 0]);
        for w in all.windows(2) {
            assert!(w[0] < w[1], "not increasing: {:?} vs {:?}", w[0], w[1]);
        }
        for c in &all {
            assert_eq!(c.iter().sum::<u64>(), 3);
        }
    }

    #[test]
    fn table_probabilities_sum_to_one() {
        let alpha = alpha_pattern(3, 1.3);
        let pi =
            two_row_probabilities(LinkFamily::Logit, &alpha, -0.7, -0.5, 0.5).unwrap();
        let total: f64 = enumerate_tables(4, 3, 3)
            .map(|t| table_probability(&t, &pi))
            .sum();
        assert!((total - 1.0).abs() < 1e-10, "total {total}");
    }

    #[test]
    fn row_exchangeability_at_null() {
        let alpha = alpha_pattern(3, 2.0);
        let pi = two_row_probabilities(LinkFamily::Logit, &alpha, 0.0, -0.5, 0.5).unwrap();
        for t in enumerate_tables(4, 2, 2) {
            let reversed = [t[1].clone(), t[0].clone()];
            let p = table_probability(&t, &pi);
            let pr = table_probability(&reversed, &pi);
            assert_eq!(p.to_bits(), pr.to_bits());
        }
    }

    #[test]
    fn bernoulli_product_by_hand() {
        // k = 2, one observation per row: four tables with probabilities
        // p1 p2, p1 (1-p2), (1-p1) p2, (1-p1)(1-p2).
        let alpha = [0.4];
        let pi = two_row_probabilities(LinkFamily::Logit, &alpha, 0.8, -0.5, 0.5).unwrap();
        let p1 = pi[0][0];
        let p2 = pi[1][0];
        let expect = |y1: u64, y2: u64| {
            (if y1 == 1 { p1 } else { 1.0 - p1 }) * (if y2 == 1 { p2 } else { 1.0 - p2 })
        };
        for t in enumerate_tables(2, 1, 1) {
            let p = table_probability(&t, &pi);
            assert!((p - expect(t[0][0], t[1][0])).abs() < 1e-14);
        }
    }

    #[test]
    fn alpha_pattern_matches_displayed_form() {
        assert_eq!(alpha_pattern(3, 2.0), vec![-2.0, 0.0, 2.0]);
        assert_eq!(alpha_pattern(2, 1.0), vec![-1.0, 0.0]);
    }
}
