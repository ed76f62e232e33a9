//! Data representation, model specification and design-block construction.
//!
//! A cumulative link model links the cumulative category probabilities
//! γ_rs = G(η_rs) of n independent multinomial count vectors to per-row
//! linear predictors η_r = Z_r δ, where each Z_r is a q×d block holding an
//! identity block for the cutpoints followed by the covariate values with
//! negative sign. Partial (category-specific) covariate effects are expanded
//! into q columns so that the same linear predictor machinery covers both the
//! proportional and the partial proportional-odds cases.

use crate::error::{Error, Result};
use crate::linalg;
use crate::links::{self, LinkFamily};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// One covariate pattern: a covariate vector and its k category counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub x: Vec<f64>,
    pub y: Vec<u64>,
}

/// Ordinal data: n rows of covariate vectors with multinomial counts over k
/// ordered categories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrdinalData {
    rows: Vec<Row>,
    k: usize,
}

impl OrdinalData {
    pub fn new(rows: Vec<Row>) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidData("no data rows".into()))?;
        let k = first.y.len();
        let p = first.x.len();
        if k < 2 {
            return Err(Error::InvalidData(format!(
                "need at least 2 response categories, got {k}"
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.y.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} categories, expected {k}",
                    row.y.len()
                )));
            }
            if row.x.len() != p {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} covariates, expected {p}",
                    row.x.len()
                )));
            }
            if row.x.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidData(format!(
                    "row {i} has a non-finite covariate value"
                )));
            }
        }
        if rows.iter().all(|r| r.y.iter().all(|&c| c == 0)) {
            return Err(Error::InvalidData("all rows have zero total count".into()));
        }
        Ok(OrdinalData { rows, k })
    }

    /// Convenience constructor from parallel covariate and count arrays.
    pub fn from_counts(x: Vec<Vec<f64>>, y: Vec<Vec<u64>>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} covariate rows vs {} count rows",
                x.len(),
                y.len()
            )));
        }
        OrdinalData::new(
            x.into_iter()
                .zip(y)
                .map(|(x, y)| Row { x, y })
                .collect(),
        )
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of non-redundant categories q = k - 1.
    pub fn q(&self) -> usize {
        self.k - 1
    }

    /// Number of covariates per row.
    pub fn p(&self) -> usize {
        self.rows[0].x.len()
    }

    /// Multinomial total of row r.
    pub fn total(&self, r: usize) -> u64 {
        self.rows[r].y.iter().sum()
    }

    /// Total count per category across all rows.
    pub fn category_totals(&self) -> Vec<u64> {
        let mut totals = vec![0u64; self.k];
        for row in &self.rows {
            for (t, &c) in totals.iter_mut().zip(&row.y) {
                *t += c;
            }
        }
        totals
    }
}

/// Merges rows with identical covariate vectors by summing their counts.
/// Output rows keep first-occurrence order.
pub fn aggregate(data: &OrdinalData) -> OrdinalData {
    let mut out: Vec<Row> = Vec::new();
    for row in data.rows() {
        match out.iter_mut().find(|r| r.x == row.x) {
            Some(existing) => {
                for (a, &b) in existing.y.iter_mut().zip(&row.y) {
                    *a += b;
                }
            }
            None => out.push(row.clone()),
        }
    }
    OrdinalData {
        rows: out,
        k: data.k,
    }
}

/// Merges every category with zero total count into its right neighbour;
/// trailing empty categories merge left into the last observed one. Returns
/// the merged data together with the old-to-new category index map.
pub fn merge_empty_categories(data: &OrdinalData) -> Result<(OrdinalData, Vec<usize>)> {
    let totals = data.category_totals();
    let observed: Vec<usize> = (0..data.k).filter(|&s| totals[s] > 0).collect();
    if observed.len() < 2 {
        return Err(Error::DegenerateData(format!(
            "only {} response categories carry observations",
            observed.len()
        )));
    }
    let mut mapping = vec![0usize; data.k];
    for s in 0..data.k {
        // Position of the first observed category at or after s, capped at
        // the last observed one so trailing empties merge left.
        let target = observed
            .iter()
            .position(|&o| o >= s)
            .unwrap_or(observed.len() - 1);
        mapping[s] = target;
    }
    let new_k = observed.len();
    let rows = data
        .rows()
        .iter()
        .map(|row| {
            let mut y = vec![0u64; new_k];
            for (s, &c) in row.y.iter().enumerate() {
                y[mapping[s]] += c;
            }
            Row {
                x: row.x.clone(),
                y,
            }
        })
        .collect();
    Ok((OrdinalData { rows, k: new_k }, mapping))
}

/// Merges only interior empty categories (rightward), leaving unobserved end
/// categories in place. The reduced-bias estimator keeps end cutpoints finite
/// and its slope estimates are invariant to merging interior empty
/// categories, so this is the appropriate preprocessing for reduced-bias
/// fits on sparse tables.
pub fn merge_interior_empty_categories(data: &OrdinalData) -> Result<(OrdinalData, Vec<usize>)> {
    let totals = data.category_totals();
    let observed: Vec<usize> = (0..data.k).filter(|&s| totals[s] > 0).collect();
    if observed.len() < 2 {
        return Err(Error::DegenerateData(format!(
            "only {} response categories carry observations",
            observed.len()
        )));
    }
    let first = observed[0];
    let last = *observed.last().unwrap();
    let mut mapping = vec![0usize; data.k];
    let mut slot = 0usize;
    for s in 0..data.k {
        mapping[s] = slot;
        // An interior empty category shares the slot of the next category to
        // its right, so the slot counter does not advance for it.
        let interior_empty = s > first && s < last && totals[s] == 0;
        if !interior_empty {
            slot += 1;
        }
    }
    let new_k = slot;
    let rows = data
        .rows()
        .iter()
        .map(|row| {
            let mut y = vec![0u64; new_k];
            for (s, &c) in row.y.iter().enumerate() {
                y[mapping[s]] += c;
            }
            Row {
                x: row.x.clone(),
                y,
            }
        })
        .collect();
    Ok((OrdinalData { rows, k: new_k }, mapping))
}

/// Reverses the category order of every row.
pub fn reverse_categories(data: &OrdinalData) -> OrdinalData {
    let rows = data
        .rows()
        .iter()
        .map(|row| {
            let mut y = row.y.clone();
            y.reverse();
            Row {
                x: row.x.clone(),
                y,
            }
        })
        .collect();
    OrdinalData {
        rows,
        k: data.k,
    }
}

/// Which covariates enter proportionally (one shared coefficient) and which
/// with category-specific coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub link: LinkFamily,
    pub k: usize,
    /// Covariate indices with a single coefficient shared across categories.
    pub proportional_cols: Vec<usize>,
    /// Covariate indices with one coefficient per category (expanded to q
    /// design columns each).
    pub partial_cols: Vec<usize>,
    /// Display names per covariate; defaults to x1, x2, ...
    pub covariate_names: Vec<String>,
}

impl ModelSpec {
    /// A purely proportional model over covariates `0..p`.
    pub fn proportional(link: LinkFamily, k: usize, p: usize) -> Self {
        ModelSpec {
            link,
            k,
            proportional_cols: (0..p).collect(),
            partial_cols: Vec::new(),
            covariate_names: (1..=p).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn new(
        link: LinkFamily,
        k: usize,
        proportional_cols: Vec<usize>,
        partial_cols: Vec<usize>,
    ) -> Result<Self> {
        if proportional_cols.iter().any(|c| partial_cols.contains(c)) {
            return Err(Error::InvalidData(
                "a covariate cannot be both proportional and partial".into(),
            ));
        }
        let max_col = proportional_cols
            .iter()
            .chain(&partial_cols)
            .max()
            .map_or(0, |&m| m + 1);
        Ok(ModelSpec {
            link,
            k,
            proportional_cols,
            partial_cols,
            covariate_names: (1..=max_col).map(|i| format!("x{i}")).collect(),
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        self.covariate_names = names;
        self
    }

    pub fn q(&self) -> usize {
        self.k - 1
    }

    /// Total parameter count d = q + |proportional| + q·|partial|.
    pub fn param_count(&self) -> usize {
        self.q() + self.proportional_cols.len() + self.q() * self.partial_cols.len()
    }

    fn covariate_name(&self, c: usize) -> String {
        self.covariate_names
            .get(c)
            .cloned()
            .unwrap_or_else(|| format!("x{}", c + 1))
    }

    /// Parameter display names: cutpoints first, then covariate columns in
    /// covariate order with partial effects expanded per category.
    pub fn param_names(&self) -> Vec<String> {
        let q = self.q();
        let mut names: Vec<String> = (1..=q).map(|s| format!("alpha_{s}")).collect();
        let mut cols: Vec<usize> = self
            .proportional_cols
            .iter()
            .chain(&self.partial_cols)
            .copied()
            .collect();
        cols.sort_unstable();
        for c in cols {
            if self.partial_cols.contains(&c) {
                for s in 1..=q {
                    names.push(format!("{}[{s}]", self.covariate_name(c)));
                }
            } else {
                names.push(self.covariate_name(c));
            }
        }
        names
    }

    /// Indices of the non-cutpoint (slope) parameters.
    pub fn beta_indices(&self) -> Vec<usize> {
        (self.q()..self.param_count()).collect()
    }
}

/// Per-row design blocks Z_r (each q×d) together with the column names.
#[derive(Debug, Clone)]
pub struct DesignBlocks {
    blocks: Vec<DMatrix<f64>>,
    col_names: Vec<String>,
    q: usize,
}

impl DesignBlocks {
    pub fn blocks(&self) -> &[DMatrix<f64>] {
        &self.blocks
    }

    pub fn block(&self, r: usize) -> &DMatrix<f64> {
        &self.blocks[r]
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn d(&self) -> usize {
        self.col_names.len()
    }

    pub fn col_names(&self) -> &[String] {
        &self.col_names
    }

    /// Builds design blocks directly from per-row matrices. The caller is
    /// responsible for identifiability; used by reparameterization tests and
    /// the equivariance checks.
    pub fn from_blocks(blocks: Vec<DMatrix<f64>>, col_names: Vec<String>) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::InvalidData("no design blocks".into()))?;
        let (q, d) = (first.nrows(), first.ncols());
        if col_names.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "{} column names for {d} columns",
                col_names.len()
            )));
        }
        if blocks.iter().any(|b| b.nrows() != q || b.ncols() != d) {
            return Err(Error::DimensionMismatch(
                "design blocks have inconsistent shapes".into(),
            ));
        }
        Ok(DesignBlocks {
            blocks,
            col_names,
            q,
        })
    }

    /// Linear predictors η_r = Z_r δ for row r.
    pub fn predictors(&self, r: usize, delta: &[f64]) -> Vec<f64> {
        let block = &self.blocks[r];
        (0..self.q)
            .map(|s| {
                let mut acc = 0.0;
                for t in 0..block.ncols() {
                    let z = block[(s, t)];
                    if z != 0.0 {
                        acc += delta[t] * z;
                    }
                }
                acc
            })
            .collect()
    }
}

/// Builds the per-row design blocks for a model specification and checks
/// identifiability of the stacked design.
pub fn build_design(spec: &ModelSpec, data: &OrdinalData) -> Result<DesignBlocks> {
    if spec.k != data.k() {
        return Err(Error::DimensionMismatch(format!(
            "spec has k={}, data has k={}",
            spec.k,
            data.k()
        )));
    }
    let p = data.p();
    if let Some(&c) = spec
        .proportional_cols
        .iter()
        .chain(&spec.partial_cols)
        .find(|&&c| c >= p)
    {
        return Err(Error::DimensionMismatch(format!(
            "covariate index {c} out of range for {p} covariates"
        )));
    }
    let q = spec.q();
    let d = spec.param_count();
    let col_names = spec.param_names();

    let mut cols: Vec<usize> = spec
        .proportional_cols
        .iter()
        .chain(&spec.partial_cols)
        .copied()
        .collect();
    cols.sort_unstable();

    let blocks: Vec<DMatrix<f64>> = data
        .rows()
        .iter()
        .map(|row| {
            let mut z = DMatrix::zeros(q, d);
            for s in 0..q {
                z[(s, s)] = 1.0;
            }
            let mut col = q;
            for &c in &cols {
                if spec.partial_cols.contains(&c) {
                    for s in 0..q {
                        z[(s, col + s)] = -row.x[c];
                    }
                    col += q;
                } else {
                    for s in 0..q {
                        z[(s, col)] = -row.x[c];
                    }
                    col += 1;
                }
            }
            z
        })
        .collect();

    // Identifiability: the stacked nq×d matrix must have full column rank.
    let n = blocks.len();
    let mut stacked = DMatrix::zeros(n * q, d);
    for (r, block) in blocks.iter().enumerate() {
        stacked.view_mut((r * q, 0), (q, d)).copy_from(block);
    }
    if let Some(dependent) = linalg::deficient_column(&stacked) {
        return Err(Error::RankDeficient {
            column: col_names[dependent].clone(),
        });
    }

    DesignBlocks::from_blocks(blocks, col_names)
}

/// Parameter vector δ = (α_1, ..., α_q, β ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector(pub Vec<f64>);

impl ParamVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The cutpoint block α_1..α_q.
    pub fn alpha(&self, q: usize) -> &[f64] {
        &self.0[..q]
    }

    /// The slope block following the cutpoints.
    pub fn beta(&self, q: usize) -> &[f64] {
        &self.0[q..]
    }
}

/// Cumulative and category probabilities evaluated at a parameter vector.
#[derive(Debug, Clone)]
pub struct Probabilities {
    /// γ_rs = G(η_rs), n rows of q entries.
    pub gamma: Vec<Vec<f64>>,
    /// π_rs = γ_rs − γ_r,s−1 with γ_r0 = 0 and γ_rk = 1; n rows of k entries.
    pub pi: Vec<Vec<f64>>,
}

/// Evaluates cumulative and category probabilities, enforcing the predictor
/// ordering η_r1 < ... < η_rq at every data row.
pub fn probabilities(
    spec: &ModelSpec,
    design: &DesignBlocks,
    delta: &ParamVector,
) -> Result<Probabilities> {
    if delta.len() != design.d() {
        return Err(Error::DimensionMismatch(format!(
            "parameter vector has length {}, design has {} columns",
            delta.len(),
            design.d()
        )));
    }
    let q = design.q();
    let k = q + 1;
    let mut gamma = Vec::with_capacity(design.n());
    let mut pi = Vec::with_capacity(design.n());
    for r in 0..design.n() {
        let eta = design.predictors(r, delta.as_slice());
        let mut gam = vec![0.0; q];
        for s in 0..q {
            if !eta[s].is_finite() {
                return Err(Error::NonFiniteEta(eta[s]));
            }
            if s > 0 && eta[s] <= eta[s - 1] {
                return Err(Error::InvalidParameter {
                    row: r,
                    category: s + 1,
                });
            }
            gam[s] = links::cdf_unchecked(spec.link, eta[s]);
        }
        let mut p = vec![0.0; k];
        let mut prev = 0.0;
        for s in 0..q {
            p[s] = (gam[s] - prev).max(0.0);
            prev = gam[s];
        }
        p[q] = (1.0 - prev).max(0.0);
        gamma.push(gam);
        pi.push(p);
    }
    Ok(Probabilities { gamma, pi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn table2_left() -> OrdinalData {
        OrdinalData::from_counts(
            vec![vec![-0.5], vec![0.5], vec![0.5]],
            vec![vec![8, 6, 1, 0], vec![10, 0, 1, 0], vec![8, 1, 0, 0]],
        )
        .unwrap()
    }

    #[test]
    fn proportional_design_matches_displayed_layout() {
        let data = OrdinalData::from_counts(
            vec![vec![0.5], vec![-0.3]],
            vec![vec![1, 1, 1, 1], vec![1, 1, 1, 1]],
        )
        .unwrap();
        let spec = ModelSpec::proportional(LinkFamily::Logit, 4, 1);
        let design = build_design(&spec, &data).unwrap();
        let z = design.block(0);
        assert_eq!((z.nrows(), z.ncols()), (3, 4));
        for s in 0..3 {
            for t in 0..3 {
                assert_eq!(z[(s, t)], if s == t { 1.0 } else { 0.0 });
            }
            assert_eq!(z[(s, 3)], -0.5);
        }
    }

    #[test]
    fn design_blocks_match_layout_for_random_covariates() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..20 {
            let x: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
            let mut rows = vec![x.clone()];
            for _ in 0..2 {
                rows.push(vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]);
            }
            let data = OrdinalData::from_counts(
                rows,
                vec![vec![1, 2, 3], vec![3, 2, 1], vec![1, 1, 1]],
            )
            .unwrap();
            let spec = ModelSpec::proportional(LinkFamily::Logit, 3, 2);
            let design = build_design(&spec, &data).unwrap();
            let z = design.block(0);
            for s in 0..2 {
                for t in 0..2 {
                    assert_eq!(z[(s, t)], if s == t { 1.0 } else { 0.0 });
                }
                assert_eq!(z[(s, 2)], -x[0]);
                assert_eq!(z[(s, 3)], -x[1]);
            }
        }
    }

    #[test]
    fn wine_model_has_nine_parameters() {
        // Partial temperature effect, proportional contact effect, k = 5.
        let spec = ModelSpec::new(LinkFamily::Logit, 5, vec![1], vec![0]).unwrap();
        assert_eq!(spec.param_count(), 4 + 4 + 1);
        let names = spec.param_names();
        assert_eq!(names[0], "alpha_1");
        assert_eq!(names[4], "x1[1]");
        assert_eq!(names[8], "x2");
    }

    #[test]
    fn duplicated_covariate_column_fails_rank_check() {
        let data = OrdinalData::from_counts(
            vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]],
            vec![vec![1, 1], vec![1, 1], vec![2, 0]],
        )
        .unwrap();
        let spec = ModelSpec::proportional(LinkFamily::Logit, 2, 2);
        match build_design(&spec, &data) {
            Err(Error::RankDeficient { column }) => {
                assert!(column.starts_with("x"), "unexpected column {column}");
            }
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn probabilities_closed_form_logistic() {
        let data = OrdinalData::from_counts(
            vec![vec![0.0], vec![1.0]],
            vec![vec![1, 1, 1, 1], vec![1, 1, 1, 1]],
        )
        .unwrap();
        let spec = ModelSpec::proportional(LinkFamily::Logit, 4, 1);
        let design = build_design(&spec, &data).unwrap();
        let delta = ParamVector(vec![-1.0, 0.0, 1.0, 0.0]);
        let probs = probabilities(&spec, &design, &delta).unwrap();
        let g = |eta: f64| 1.0 / (1.0 + (-eta as f64).exp());
        let expected = [g(-1.0), 0.5 - g(-1.0), g(1.0) - 0.5, 1.0 - g(1.0)];
        for (a, b) in probs.pi[0].iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((probs.pi[0][0] - 0.2689).abs() < 5e-5);
        assert!((probs.pi[0][1] - 0.2311).abs() < 5e-5);
    }

    #[test]
    fn probabilities_at_reduced_bias_artificial_fit() {
        // Proportional-odds fit of the artificial data: beta = -1.761,
        // alpha = (1.084, 2.781, 4.457). At x = 1/2 the first cumulative
        // probability is G(1.084 + 1.761/2) = G(1.9645) ~ 0.877.
        let data = table2_left();
        let spec = ModelSpec::proportional(LinkFamily::Logit, 4, 1);
        let design = build_design(&spec, &data).unwrap();
        let delta = ParamVector(vec![1.084, 2.781, 4.457, -1.761]);
        let probs = probabilities(&spec, &design, &delta).unwrap();
        assert!((probs.gamma[1][0] - 0.877).abs() < 5e-4);
    }

    #[test]
    fn zero_slopes_give_identical_rows() {
        let data = OrdinalData::from_counts(
            vec![vec![-1.0], vec![3.0]],
            vec![vec![1, 1, 1], vec![1, 1, 1]],
        )
        .unwrap();
        let spec = ModelSpec::proportional(LinkFamily::Probit, 3, 1);
        let design = build_design(&spec, &data).unwrap();
        let delta = ParamVector(vec![-0.3, 0.9, 0.0]);
        let probs = probabilities(&spec, &design, &delta).unwrap();
        for (a, b) in probs.pi[0].iter().zip(&probs.pi[1]) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn probability_rows_sum_to_one() {
        let mut rng = StdRng::seed_from_u64(7);
        let data = OrdinalData::from_counts(
            vec![vec![0.2], vec![-1.4], vec![2.0]],
            vec![vec![1, 0, 2, 1], vec![0, 1, 1, 1], vec![2, 2, 0, 0]],
        )
        .unwrap();
        let spec = ModelSpec::proportional(LinkFamily::Cloglog, 4, 1);
        let design = build_design(&spec, &data).unwrap();
        for _ in 0..50 {
            let delta = ParamVector(vec![
                rng.random_range(-2.0..-1.0),
                rng.random_range(-0.5..0.5),
                rng.random_range(1.0..2.0),
                rng.random_range(-0.5..0.5),
            ]);
            let probs = probabilities(&spec, &design, &delta).unwrap();
            for (r, row) in probs.pi.iter().enumerate() {
                let sum: f64 = row.iter().sum();
                assert!((sum - 1.0).abs() < 1e-12, "row {r} sums to {sum}");
                assert!(row.iter().all(|&p| p >= 0.0));
                let gam = &probs.gamma[r];
                assert!(gam.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn unordered_predictors_are_rejected() {
        let data = OrdinalData::from_counts(
            vec![vec![0.0], vec![1.0]],
            vec![vec![1, 1, 1], vec![1, 1, 1]],
        )
        .unwrap();
        let spec = ModelSpec::proportional(LinkFamily::Logit, 3, 1);
        let design = build_design(&spec, &data).unwrap();
        let delta = ParamVector(vec![1.0, -1.0, 0.0]);
        match probabilities(&spec, &design, &delta) {
            Err(Error::InvalidParameter { row: 0, category: 2 }) => {}
            other => panic!("expected ordering violation, got {other:?}"),
        }
    }

    #[test]
    fn aggregate_merges_table2_representations() {
        let left = table2_left();
        let agg = aggregate(&left);
        assert_eq!(agg.n(), 2);
        assert_eq!(agg.rows()[0].y, vec![8, 6, 1, 0]);
        assert_eq!(agg.rows()[1].y, vec![18, 1, 1, 0]);
        // Idempotence and count preservation.
        let again = aggregate(&agg);
        assert_eq!(again, agg);
        assert_eq!(agg.category_totals(), left.category_totals());
    }

    #[test]
    fn aggregate_collapses_identical_rows() {
        let data = OrdinalData::from_counts(
            vec![vec![1.0], vec![1.0], vec![1.0]],
            vec![vec![1, 0], vec![0, 2], vec![3, 1]],
        )
        .unwrap();
        let agg = aggregate(&data);
        assert_eq!(agg.n(), 1);
        assert_eq!(agg.rows()[0].y, vec![4, 3]);
    }

    #[test]
    fn merge_empty_categories_merges_rightward() {
        let data = OrdinalData::from_counts(
            vec![vec![0.0], vec![1.0]],
            vec![vec![2, 0, 3, 1], vec![3, 0, 0, 1]],
        )
        .unwrap();
        assert_eq!(data.category_totals(), vec![5, 0, 3, 2]);
        let (merged, mapping) = merge_empty_categories(&data).unwrap();
        assert_eq!(merged.k(), 3);
        assert_eq!(merged.category_totals(), vec![5, 3, 2]);
        assert_eq!(mapping, vec![0, 1, 1, 2]);
    }

    #[test]
    fn merge_empty_categories_handles_trailing_and_identity() {
        let data =
            OrdinalData::from_counts(vec![vec![0.0]], vec![vec![2, 3, 0, 0]]).unwrap();
        let (merged, mapping) = merge_empty_categories(&data).unwrap();
        assert_eq!(merged.k(), 2);
        assert_eq!(merged.rows()[0].y, vec![2, 3]);
        assert_eq!(mapping, vec![0, 1, 1, 1]);

        let full = OrdinalData::from_counts(vec![vec![0.0]], vec![vec![1, 2, 3]]).unwrap();
        let (same, id) = merge_empty_categories(&full).unwrap();
        assert_eq!(same, full);
        assert_eq!(id, vec![0, 1, 2]);
    }

    #[test]
    fn interior_merge_keeps_empty_end_categories() {
        let data = OrdinalData::from_counts(
            vec![vec![0.0]],
            vec![vec![0, 3, 0, 2, 0]],
        )
        .unwrap();
        let (merged, mapping) = merge_interior_empty_categories(&data).unwrap();
        assert_eq!(merged.k(), 4);
        assert_eq!(merged.rows()[0].y, vec![0, 3, 2, 0]);
        assert_eq!(mapping, vec![0, 1, 2, 2, 3]);

        // Chained interior empties collapse into the next observed category.
        let chain = OrdinalData::from_counts(vec![vec![0.0]], vec![vec![3, 0, 0, 2]]).unwrap();
        let (merged, mapping) = merge_interior_empty_categories(&chain).unwrap();
        assert_eq!(merged.rows()[0].y, vec![3, 2]);
        assert_eq!(mapping, vec![0, 1, 1, 1]);
    }

    #[test]
    fn merge_empty_categories_rejects_degenerate_data() {
        let data = OrdinalData::from_counts(vec![vec![0.0]], vec![vec![0, 5, 0]]).unwrap();
        assert!(matches!(
            merge_empty_categories(&data),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn reverse_categories_examples() {
        let data = OrdinalData::from_counts(vec![vec![0.0]], vec![vec![4, 9, 5, 0, 0]]).unwrap();
        let rev = reverse_categories(&data);
        assert_eq!(rev.rows()[0].y, vec![0, 0, 5, 9, 4]);
        assert_eq!(reverse_categories(&rev), data);

        let two = OrdinalData::from_counts(vec![vec![0.0]], vec![vec![3, 7]]).unwrap();
        assert_eq!(reverse_categories(&two).rows()[0].y, vec![7, 3]);
    }
}
