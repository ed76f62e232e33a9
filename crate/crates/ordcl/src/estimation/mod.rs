//! Score, information and adjustment kernels plus the fitting algorithms.
//!
//! The multinomial log-likelihood of the cumulative link model has score
//! components
//!
//! ```text
//! U_t = Σ_r Σ_s g_rs (y_rs/π_rs − y_rs+1/π_rs+1) z_rst
//! ```
//!
//! and expected information F = Σ_r Z_rᵀ W_r Z_r where W_r is the symmetric
//! tridiagonal matrix of quadratic weights. Bias reduction replaces the
//! counts y_rs by parameter-dependent adjusted counts y_rs + c_rs − c_rs−1
//! with c_rs = ½ m_r g'_rs v_rss and v_rss the predictor variance; the
//! resulting adjusted score has its root at the reduced-bias estimate.

mod fit;

pub use fit::{
    default_start, detect_boundary, fisher_scoring, fit_bc, fit_bc_iterated, fit_ml,
    fit_ml_counts, fit_rb, fit_rb_design, BoundaryFlag, FitControl, FitResult, Method,
};
pub(crate) use fit::bias_correct_ml;

use crate::error::{Error, Result};
use crate::linalg;
use crate::links::{self, LinkFamily, PROB_EPS};
use crate::model::{DesignBlocks, ModelSpec, OrdinalData, ParamVector};
use nalgebra::{DMatrix, DVector};

/// Real-valued count matrix. Raw data counts are integers, but the iterated
/// bias-reduction fits operate on non-integer adjusted counts, so the fitting
/// kernels work on `f64` throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct Counts {
    rows: Vec<Vec<f64>>,
}

impl Counts {
    pub fn new(rows: Vec<Vec<f64>>) -> Self {
        Counts { rows }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.rows[r]
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn total(&self, r: usize) -> f64 {
        self.rows[r].iter().sum()
    }

    pub fn totals(&self) -> Vec<f64> {
        (0..self.n()).map(|r| self.total(r)).collect()
    }
}

impl From<&OrdinalData> for Counts {
    fn from(data: &OrdinalData) -> Self {
        Counts {
            rows: data
                .rows()
                .iter()
                .map(|row| row.y.iter().map(|&c| c as f64).collect())
                .collect(),
        }
    }
}

/// Per-row model quantities at a parameter value: predictors, cumulative and
/// category probabilities, densities and density derivatives.
#[derive(Debug, Clone)]
pub struct ModelState {
    pub eta: Vec<Vec<f64>>,
    pub gamma: Vec<Vec<f64>>,
    pub pi: Vec<Vec<f64>>,
    pub g: Vec<Vec<f64>>,
    pub gp: Vec<Vec<f64>>,
}

impl ModelState {
    /// Evaluates the model at `delta`, enforcing strict predictor ordering
    /// per data row.
    pub fn evaluate(link: LinkFamily, design: &DesignBlocks, delta: &[f64]) -> Result<Self> {
        if delta.len() != design.d() {
            return Err(Error::DimensionMismatch(format!(
                "parameter vector has length {}, design has {} columns",
                delta.len(),
                design.d()
            )));
        }
        let q = design.q();
        let n = design.n();
        let mut eta = Vec::with_capacity(n);
        let mut gamma = Vec::with_capacity(n);
        let mut pi = Vec::with_capacity(n);
        let mut g = Vec::with_capacity(n);
        let mut gp = Vec::with_capacity(n);
        for r in 0..n {
            let e = design.predictors(r, delta);
            let mut gam = vec![0.0; q];
            let mut den = vec![0.0; q];
            let mut dden = vec![0.0; q];
            for s in 0..q {
                if !e[s].is_finite() {
                    return Err(Error::NonFiniteEta(e[s]));
                }
                if s > 0 && e[s] <= e[s - 1] {
                    return Err(Error::InvalidParameter {
                        row: r,
                        category: s + 1,
                    });
                }
                gam[s] = links::cdf_unchecked(link, e[s]);
                den[s] = links::density_unchecked(link, e[s]);
                dden[s] = links::density_deriv_unchecked(link, e[s]);
            }
            let mut p = vec![0.0; q + 1];
            let mut prev = 0.0;
            for s in 0..q {
                p[s] = (gam[s] - prev).max(0.0);
                prev = gam[s];
            }
            p[q] = (1.0 - prev).max(0.0);
            eta.push(e);
            gamma.push(gam);
            pi.push(p);
            g.push(den);
            gp.push(dden);
        }
        Ok(ModelState {
            eta,
            gamma,
            pi,
            g,
            gp,
        })
    }

    pub fn n(&self) -> usize {
        self.pi.len()
    }

    pub fn q(&self) -> usize {
        self.gamma.first().map_or(0, |g| g.len())
    }
}

#[inline]
fn ratio(num: f64, pi: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / pi.max(PROB_EPS)
    }
}

/// Multinomial log-likelihood Σ_r Σ_s y_rs log π_rs, without the constant
/// multinomial coefficient.
pub(crate) fn loglik_state(state: &ModelState, counts: &Counts) -> f64 {
    let mut ll = 0.0;
    for (pi_row, y_row) in state.pi.iter().zip(counts.rows()) {
        for (&p, &y) in pi_row.iter().zip(y_row) {
            if y != 0.0 {
                ll += y * p.max(f64::MIN_POSITIVE).ln();
            }
        }
    }
    ll
}

/// Score vector for arbitrary (possibly adjusted, possibly signed) counts.
pub(crate) fn score_state(state: &ModelState, design: &DesignBlocks, counts: &Counts) -> DVector<f64> {
    let d = design.d();
    let q = design.q();
    let mut u = DVector::zeros(d);
    for r in 0..state.n() {
        let pi = &state.pi[r];
        let g = &state.g[r];
        let y = counts.row(r);
        let z = design.block(r);
        for s in 0..q {
            let kernel = g[s] * (ratio(y[s], pi[s]) - ratio(y[s + 1], pi[s + 1]));
            if kernel != 0.0 {
                for t in 0..d {
                    let zst = z[(s, t)];
                    if zst != 0.0 {
                        u[t] += kernel * zst;
                    }
                }
            }
        }
    }
    u
}

/// Expected information F = Σ_r Z_rᵀ W_r Z_r with W_r the tridiagonal
/// quadratic-weight matrix of row r.
pub(crate) fn fisher_state(state: &ModelState, design: &DesignBlocks, totals: &[f64]) -> DMatrix<f64> {
    let d = design.d();
    let q = design.q();
    let mut f = DMatrix::zeros(d, d);
    let mut wz = DMatrix::zeros(q, d);
    for r in 0..state.n() {
        let m = totals[r];
        if m == 0.0 {
            continue;
        }
        let pi = &state.pi[r];
        let g = &state.g[r];
        let z = design.block(r);
        let inv_pi: Vec<f64> = pi.iter().map(|&p| 1.0 / p.max(PROB_EPS)).collect();
        let diag: Vec<f64> = (0..q)
            .map(|s| m * g[s] * g[s] * (inv_pi[s] + inv_pi[s + 1]))
            .collect();
        let off: Vec<f64> = (0..q.saturating_sub(1))
            .map(|s| -m * g[s] * g[s + 1] * inv_pi[s + 1])
            .collect();
        // wz = W_r Z_r, then F += Z_rᵀ wz.
        for s in 0..q {
            for t in 0..d {
                let mut acc = diag[s] * z[(s, t)];
                if s > 0 {
                    acc += off[s - 1] * z[(s - 1, t)];
                }
                if s + 1 < q {
                    acc += off[s] * z[(s + 1, t)];
                }
                wz[(s, t)] = acc;
            }
        }
        for t1 in 0..d {
            for t2 in 0..d {
                let mut acc = 0.0;
                for s in 0..q {
                    acc += z[(s, t1)] * wz[(s, t2)];
                }
                f[(t1, t2)] += acc;
            }
        }
    }
    // Symmetrize away rounding crumbs.
    for t1 in 0..d {
        for t2 in (t1 + 1)..d {
            let v = 0.5 * (f[(t1, t2)] + f[(t2, t1)]);
            f[(t1, t2)] = v;
            f[(t2, t1)] = v;
        }
    }
    f
}

/// The parameter-dependent count adjustments of the bias-reducing score.
///
/// `c` has one row per data row with k+1 entries (c_r0 = c_rk = 0); `a` holds
/// the per-category additive adjustments a_rs = c_rs − c_rs−1, which
/// telescope to zero within each row.
#[derive(Debug, Clone)]
pub struct AdjustmentTerms {
    pub c: Vec<Vec<f64>>,
    pub a: Vec<Vec<f64>>,
}

pub(crate) fn adjustment_terms_state(
    state: &ModelState,
    design: &DesignBlocks,
    totals: &[f64],
    finv: &DMatrix<f64>,
) -> AdjustmentTerms {
    let q = design.q();
    let k = q + 1;
    let d = design.d();
    let n = state.n();
    let mut c = vec![vec![0.0; k + 1]; n];
    let mut a = vec![vec![0.0; k]; n];
    for r in 0..n {
        let z = design.block(r);
        let gp = &state.gp[r];
        for s in 0..q {
            // v_rss = z_rs F⁻¹ z_rsᵀ for the sth predictor of row r.
            let mut v = 0.0;
            for t1 in 0..d {
                let zt1 = z[(s, t1)];
                if zt1 == 0.0 {
                    continue;
                }
                let mut acc = 0.0;
                for t2 in 0..d {
                    let zt2 = z[(s, t2)];
                    if zt2 != 0.0 {
                        acc += finv[(t1, t2)] * zt2;
                    }
                }
                v += zt1 * acc;
            }
            c[r][s + 1] = 0.5 * totals[r] * gp[s] * v;
        }
        for s in 0..k {
            a[r][s] = c[r][s + 1] - c[r][s];
        }
    }
    AdjustmentTerms { c, a }
}

fn fisher_inverse_state(
    state: &ModelState,
    design: &DesignBlocks,
    totals: &[f64],
) -> Result<DMatrix<f64>> {
    let f = fisher_state(state, design, totals);
    linalg::inverse(&f, linalg::DEFAULT_RCOND, "Fisher information")
}

fn counts_plus_adjustment(counts: &Counts, terms: &AdjustmentTerms) -> Counts {
    let rows = counts
        .rows()
        .iter()
        .zip(&terms.a)
        .map(|(y, a)| y.iter().zip(a).map(|(&y, &a)| y + a).collect())
        .collect();
    Counts::new(rows)
}

/// Non-negative adjusted counts whose plain maximum likelihood score equals
/// the adjusted score at the generating parameter value.
///
/// The raw per-category adjustment a_rs can be negative. Adding any multiple
/// of the category probabilities to a row leaves the score kernels unchanged
/// (the additions telescope), so each row is shifted by t_r·π_rs with
/// t_r = max(0, max_s −a_rs/π_rs), the smallest uniform shift that makes
/// every additive adjustment non-negative.
pub(crate) fn adjusted_counts_state(
    state: &ModelState,
    counts: &Counts,
    terms: &AdjustmentTerms,
) -> Counts {
    let rows = counts
        .rows()
        .iter()
        .enumerate()
        .map(|(r, y)| {
            let pi = &state.pi[r];
            let a = &terms.a[r];
            let mut t = 0.0_f64;
            for s in 0..y.len() {
                t = t.max(-a[s] / pi[s].max(PROB_EPS));
            }
            (0..y.len())
                .map(|s| (y[s] + a[s] + t * pi[s].max(PROB_EPS)).max(0.0))
                .collect()
        })
        .collect();
    Counts::new(rows)
}

fn check_spec(spec: &ModelSpec, design: &DesignBlocks, data: &OrdinalData) -> Result<()> {
    if data.k() != spec.k || design.q() != spec.q() || design.n() != data.n() {
        return Err(Error::DimensionMismatch(
            "spec, design and data dimensions disagree".into(),
        ));
    }
    Ok(())
}

/// Log-likelihood at `delta`.
pub fn log_likelihood(
    spec: &ModelSpec,
    design: &DesignBlocks,
    data: &OrdinalData,
    delta: &ParamVector,
) -> Result<f64> {
    check_spec(spec, design, data)?;
    let state = ModelState::evaluate(spec.link, design, delta.as_slice())?;
    Ok(loglik_state(&state, &Counts::from(data)))
}

/// Score vector U(δ) of the multinomial log-likelihood.
pub fn score(
    spec: &ModelSpec,
    design: &DesignBlocks,
    data: &OrdinalData,
    delta: &ParamVector,
) -> Result<Vec<f64>> {
    check_spec(spec, design, data)?;
    let state = ModelState::evaluate(spec.link, design, delta.as_slice())?;
    Ok(score_state(&state, design, &Counts::from(data))
        .iter()
        .copied()
        .collect())
}

/// Expected (Fisher) information matrix F(δ).
pub fn fisher_info(
    spec: &ModelSpec,
    design: &DesignBlocks,
    data: &OrdinalData,
    delta: &ParamVector,
) -> Result<DMatrix<f64>> {
    check_spec(spec, design, data)?;
    let state = ModelState::evaluate(spec.link, design, delta.as_slice())?;
    let totals: Vec<f64> = (0..data.n()).map(|r| data.total(r) as f64).collect();
    Ok(fisher_state(&state, design, &totals))
}

/// Count adjustments c_rs = ½ m_r g'_rs v_rss and their first differences.
pub fn adjustment_terms(
    spec: &ModelSpec,
    design: &DesignBlocks,
    data: &OrdinalData,
    delta: &ParamVector,
) -> Result<AdjustmentTerms> {
    check_spec(spec, design, data)?;
    let state = ModelState::evaluate(spec.link, design, delta.as_slice())?;
    let totals: Vec<f64> = (0..data.n()).map(|r| data.total(r) as f64).collect();
    let finv = fisher_inverse_state(&state, design, &totals)?;
    Ok(adjustment_terms_state(&state, design, &totals, &finv))
}

/// Bias-reducing adjusted score U*(δ) = U(δ) + A(δ), computed as the plain
/// score kernel applied to the adjusted counts y_rs + c_rs − c_rs−1.
pub fn adjusted_score(
    spec: &ModelSpec,
    design: &DesignBlocks,
    data: &OrdinalData,
    delta: &ParamVector,
) -> Result<Vec<f64>> {
    check_spec(spec, design, data)?;
    let state = ModelState::evaluate(spec.link, design, delta.as_slice())?;
    let totals: Vec<f64> = (0..data.n()).map(|r| data.total(r) as f64).collect();
    let finv = fisher_inverse_state(&state, design, &totals)?;
    let terms = adjustment_terms_state(&state, design, &totals, &finv);
    let adjusted = counts_plus_adjustment(&Counts::from(data), &terms);
    Ok(score_state(&state, design, &adjusted).iter().copied().collect())
}

/// Non-negative adjusted counts evaluated at `delta`; the score of the plain
/// multinomial likelihood on these counts equals [`adjusted_score`] exactly.
pub fn adjusted_counts(
    spec: &ModelSpec,
    design: &DesignBlocks,
    data: &OrdinalData,
    delta: &ParamVector,
) -> Result<Vec<Vec<f64>>> {
    check_spec(spec, design, data)?;
    let state = ModelState::evaluate(spec.link, design, delta.as_slice())?;
    let totals: Vec<f64> = (0..data.n()).map(|r| data.total(r) as f64).collect();
    let finv = fisher_inverse_state(&state, design, &totals)?;
    let terms = adjustment_terms_state(&state, design, &totals, &finv);
    Ok(adjusted_counts_state(&state, &Counts::from(data), &terms)
        .rows()
        .to_vec())
}

/// First-order bias term b(δ) = −F⁻¹(δ) A(δ).
pub fn first_order_bias(
    spec: &ModelSpec,
    design: &DesignBlocks,
    data: &OrdinalData,
    delta: &ParamVector,
) -> Result<Vec<f64>> {
    check_spec(spec, design, data)?;
    let state = ModelState::evaluate(spec.link, design, delta.as_slice())?;
    let totals: Vec<f64> = (0..data.n()).map(|r| data.total(r) as f64).collect();
    let f = fisher_state(&state, design, &totals);
    let finv = linalg::inverse(&f, linalg::DEFAULT_RCOND, "Fisher information")?;
    let terms = adjustment_terms_state(&state, design, &totals, &finv);
    // A(δ) is the score kernel applied to the raw adjustments alone.
    let zeros = Counts::new(vec![vec![0.0; data.k()]; data.n()]);
    let adj = counts_plus_adjustment(&zeros, &terms);
    let a = score_state(&state, design, &adj);
    let b = linalg::solve(&f, &a, linalg::DEFAULT_RCOND, "first-order bias")?;
    Ok((-b).iter().copied().collect())
}
