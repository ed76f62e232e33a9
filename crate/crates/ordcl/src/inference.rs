//! Wald summaries, confidence intervals, contrast tests, the adjusted score
//! statistic and closed-form empirical-logit estimators.

use crate::error::{Error, Result};
use crate::estimation::{adjusted_score, fisher_info, FitResult};
use crate::linalg;
use crate::links::{normal_cdf, normal_quantile};
use crate::model::{build_design, ModelSpec, OrdinalData, ParamVector};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

/// Upper tail of the χ² distribution with `df` degrees of freedom.
pub fn chi_squared_upper_tail(df: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_ur(df as f64 / 2.0, x / 2.0)
}

/// Per-parameter Wald summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaldRow {
    pub name: String,
    pub estimate: f64,
    pub se: f64,
    pub z: f64,
    /// Two-sided normal p-value for the parameter being zero.
    pub p: f64,
}

/// Wald Z statistics for every parameter of a fit. Diverging parameters keep
/// their numeric artifacts: the runaway standard error drives z towards zero.
pub fn wald_z(fit: &FitResult) -> Vec<WaldRow> {
    let se = fit.se();
    fit.param_names
        .iter()
        .zip(fit.delta_hat.as_slice())
        .zip(&se)
        .map(|((name, &estimate), &se)| {
            let z = if se > 0.0 { estimate / se } else { f64::NAN };
            let p = 2.0 * (1.0 - normal_cdf(z.abs()));
            WaldRow {
                name: name.clone(),
                estimate,
                se,
                z,
                p,
            }
        })
        .collect()
}

/// Wald confidence intervals estimate ± z_{1−a/2}·SE. Parameters flagged as
/// diverging or at ±∞ get the conventional (−∞, ∞) interval.
pub fn wald_ci(fit: &FitResult, level: f64) -> Result<Vec<(f64, f64)>> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidData(format!(
            "confidence level {level} outside (0, 1)"
        )));
    }
    let z = normal_quantile(1.0 - (1.0 - level) / 2.0)?;
    let se = fit.se();
    Ok(fit
        .delta_hat
        .as_slice()
        .iter()
        .zip(&se)
        .zip(&fit.boundary_flags)
        .map(|((&est, &se), &flag)| {
            if !flag.is_finite() || !se.is_finite() {
                (f64::NEG_INFINITY, f64::INFINITY)
            } else {
                (est - z * se, est + z * se)
            }
        })
        .collect())
}

/// A full-rank c×d matrix of parameter contrasts.
#[derive(Debug, Clone)]
pub struct ContrastMatrix {
    l: DMatrix<f64>,
}

impl ContrastMatrix {
    /// Contrasts over the full parameter vector.
    pub fn new(rows: Vec<Vec<f64>>, d: usize) -> Result<Self> {
        let c = rows.len();
        if c == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch(format!(
                "contrast rows must all have length {d}"
            )));
        }
        let l = DMatrix::from_fn(c, d, |i, j| rows[i][j]);
        if linalg::deficient_column(&l.transpose()).is_some() {
            return Err(Error::InvalidData(
                "contrast matrix does not have full row rank".into(),
            ));
        }
        Ok(ContrastMatrix { l })
    }

    /// Contrasts over the slope block only, zero-padded over the cutpoints.
    /// `q` is the cutpoint count and `d` the total parameter count.
    pub fn over_beta_block(rows: Vec<Vec<f64>>, q: usize, d: usize) -> Result<Self> {
        let padded = rows
            .into_iter()
            .map(|row| {
                let mut full = vec![0.0; d];
                for (j, v) in row.into_iter().enumerate() {
                    full[q + j] = v;
                }
                full
            })
            .collect();
        ContrastMatrix::new(padded, d)
    }

    /// Differences-against-last contrast for testing equality of the q
    /// category-specific coefficients occupying parameter columns
    /// `first..first+q`.
    pub fn equal_coefficients(first: usize, q: usize, d: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidData(
                "equality contrast needs at least two coefficients".into(),
            ));
        }
        let rows = (0..q - 1)
            .map(|i| {
                let mut row = vec![0.0; d];
                row[first + i] = 1.0;
                row[first + q - 1] = -1.0;
                row
            })
            .collect();
        ContrastMatrix::new(rows, d)
    }

    pub fn c(&self) -> usize {
        self.l.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.l
    }
}

/// Result of a χ² test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Wald statistic W = (Lδ)ᵀ {L F⁻¹ Lᵀ}⁻¹ (Lδ), χ² with rank(L) degrees of
/// freedom.
pub fn wald_contrast_test(fit: &FitResult, contrast: &ContrastMatrix) -> Result<TestResult> {
    let d = fit.d();
    if contrast.l.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "contrast has {} columns, fit has {d} parameters",
            contrast.l.ncols()
        )));
    }
    for t in 0..d {
        let involved = (0..contrast.c()).any(|i| contrast.l[(i, t)] != 0.0);
        if involved && !fit.boundary_flags[t].is_finite() {
            return Err(Error::UndefinedEstimator(format!(
                "contrast involves boundary parameter '{}'",
                fit.param_names[t]
            )));
        }
    }
    let delta = DVector::from_row_slice(fit.delta_hat.as_slice());
    let vcov = DMatrix::from_fn(d, d, |i, j| fit.vcov[i][j]);
    let l_delta = &contrast.l * delta;
    let lvl = &contrast.l * vcov * contrast.l.transpose();
    let solved = linalg::solve(&lvl, &l_delta, linalg::DEFAULT_RCOND, "contrast covariance")?;
    let statistic = l_delta.dot(&solved);
    let df = contrast.c();
    Ok(TestResult {
        statistic,
        df,
        p_value: chi_squared_upper_tail(df, statistic),
    })
}

/// Embeds a small-model estimate into a larger parameter space: entry `t` of
/// the result is `delta_small[map[t]]`.
pub fn embed_restricted(delta_small: &[f64], map: &[usize], d_large: usize) -> Result<ParamVector> {
    if map.len() != d_large {
        return Err(Error::DimensionMismatch(format!(
            "embedding map has {} entries for {d_large} parameters",
            map.len()
        )));
    }
    let mut delta = vec![0.0; d_large];
    for (t, &s) in map.iter().enumerate() {
        let v = delta_small.get(s).ok_or_else(|| {
            Error::DimensionMismatch(format!("embedding map entry {s} out of range"))
        })?;
        delta[t] = *v;
    }
    Ok(ParamVector(delta))
}

/// Adjusted score statistic {U*(δ̃₋)}ᵀ F⁻¹(δ̃₋) U*(δ̃₋) for a nested-model
/// comparison, evaluated in the large model at the embedded restricted
/// estimate. `restricted_param_count` is the parameter count of the small
/// model; the statistic is χ² with the parameter-count difference as degrees
/// of freedom.
pub fn adjusted_score_test(
    spec_large: &ModelSpec,
    data: &OrdinalData,
    delta_restricted: &ParamVector,
    restricted_param_count: usize,
) -> Result<TestResult> {
    let d_large = spec_large.param_count();
    if restricted_param_count >= d_large {
        return Err(Error::InvalidData(
            "restricted model must have fewer parameters than the full model".into(),
        ));
    }
    let design = build_design(spec_large, data)?;
    let u_star = DVector::from_row_slice(&adjusted_score(
        spec_large,
        &design,
        data,
        delta_restricted,
    )?);
    let f = fisher_info(spec_large, &design, data, delta_restricted)?;
    let solved = linalg::solve(&f, &u_star, linalg::DEFAULT_RCOND, "adjusted score test")?;
    let statistic = u_star.dot(&solved);
    let df = d_large - restricted_param_count;
    Ok(TestResult {
        statistic,
        df,
        p_value: chi_squared_upper_tail(df, statistic),
    })
}

/// Empirical logistic transforms log{(R_s + ½)/(m − R_s + ½)} of the
/// cumulative counts; finite for every count vector including boundary ones.
pub fn empirical_logit(counts: &[u64]) -> Result<Vec<f64>> {
    let m: u64 = counts.iter().sum();
    if m == 0 {
        return Err(Error::DegenerateData("empty count vector".into()));
    }
    let m = m as f64;
    let mut out = Vec::with_capacity(counts.len().saturating_sub(1));
    let mut cum = 0.0;
    for &c in &counts[..counts.len() - 1] {
        cum += c as f64;
        out.push(((cum + 0.5) / (m - cum + 0.5)).ln());
    }
    Ok(out)
}

/// Closed-form difference of ½-adjusted empirical logits for a 2×2 table:
/// log{(y₁₁+½)/(m₁−y₁₁+½)} − log{(y₂₁+½)/(m₂−y₂₁+½)}. With the two-level
/// covariate coded ∓½ this estimates the cumulative-logit difference β.
pub fn gen_emp_logit_2x2(y11: u64, m1: u64, y21: u64, m2: u64) -> Result<f64> {
    if y11 > m1 || y21 > m2 {
        return Err(Error::InvalidData(
            "cell count exceeds its row total".into(),
        ));
    }
    let half = |y: u64, m: u64| ((y as f64 + 0.5) / ((m - y) as f64 + 0.5)).ln();
    Ok(half(y11, m1) - half(y21, m2))
}

/// Variance of [`gen_emp_logit_2x2`] from the usual ½-adjusted empirical
/// logit variance, used for its Wald intervals in the enumeration study.
pub fn gen_emp_logit_2x2_variance(y11: u64, m1: u64, y21: u64, m2: u64) -> f64 {
    let term = |y: u64, m: u64| 1.0 / (y as f64 + 0.5) + 1.0 / ((m - y) as f64 + 0.5);
    term(y11, m1) + term(y21, m2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{fit_ml, fit_rb, FitControl};
    use crate::links::LinkFamily;
    use crate::model::OrdinalData;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn interior_data() -> OrdinalData {
        OrdinalData::from_counts(
            vec![vec![-0.5], vec![0.5]],
            vec![vec![3, 4, 2, 1], vec![1, 2, 4, 3]],
        )
        .unwrap()
    }

    #[test]
    fn chi_squared_tail_reference_values() {
        // Q(1, 3.841459) = 0.05 and Q(3, 7.814728) = 0.05.
        assert!((chi_squared_upper_tail(1, 3.841458820694124) - 0.05).abs() < 1e-10);
        assert!((chi_squared_upper_tail(3, 7.814727903251179) - 0.05).abs() < 1e-10);
        assert_eq!(chi_squared_upper_tail(2, 0.0), 1.0);
    }

    #[test]
    fn wald_interval_normal_quantile() {
        let data = interior_data();
        let spec = ModelSpec::proportional(LinkFamily::Logit, 4, 1);
        let mut fit = fit_ml(&spec, &data, &FitControl::default()).unwrap();
        // Force a unit-variance zero estimate to pin the quantile.
        fit.delta_hat.0[3] = 0.0;
        for row in fit.vcov.iter_mut() {
            for v in row.iter_mut() {
                *v = 0.0;
            }
        }
        for t in 0..4 {
            fit.vcov[t][t] = 1.0;
        }
        let ci = wald_ci(&fit, 0.95).unwrap();
        assert!((ci[3].0 - -1.959964).abs() < 1e-5);
        assert!((ci[3].1 - 1.959964).abs() < 1e-5);
    }

    #[test]
    fn diverging_parameters_get_unbounded_intervals() {
        let data = OrdinalData::from_counts(
            vec![vec![-0.5], vec![0.5]],
            vec![vec![8, 6, 1, 0], vec![18, 1, 1, 0]],
        )
        .unwrap();
        let spec = ModelSpec::proportional(LinkFamily::Logit, 4, 1);
        let fit = fit_ml(&spec, &data, &FitControl::default()).unwrap();
        let ci = wald_ci(&fit, 0.95).unwrap();
        // alpha_3 is at +infinity: conventional interval.
        assert_eq!(ci[2], (f64::NEG_INFINITY, f64::INFINITY));
        // beta is finite: interval matches estimate ± 1.96·SE.
        let beta = fit.delta_hat.0[3];
        let se = fit.se()[3];
        assert!((ci[3].0 - (beta - 1.959964 * se)).abs() < 1e-4);
    }

    #[test]
    fn single_row_contrast_matches_squared_z() {
        let data = interior_data();
        let spec = ModelSpec::proportional(LinkFamily::Logit, 4, 1);
        let fit = fit_ml(&spec, &data, &FitControl::default()).unwrap();
        let contrast = ContrastMatrix::over_beta_block(vec![vec![1.0]], 3, 4).unwrap();
        let test = wald_contrast_test(&fit, &contrast).unwrap();
        let z = wald_z(&fit)[3].z;
        assert!((test.statistic - z * z).abs() < 1e-10);
        assert_eq!(test.df, 1);
    }

    #[test]
    fn contrast_test_invariant_under_row_mixing() {
        let data = interior_data();
        let spec = ModelSpec::proportional(LinkFamily::Logit, 4, 1);
        let fit = fit_rb(&spec, &data, &FitControl::default()).unwrap();
        let l1 = ContrastMatrix::new(
            vec![vec![1.0, 0.0, 0.0, 0.5], vec![0.0, 1.0, -1.0, 0.0]],
            4,
        )
        .unwrap();
        // M·L for an invertible 2×2 M = [[2, 1], [1, -3]].
        let l2 = ContrastMatrix::new(
            vec![vec![2.0, 1.0, -1.0, 1.0], vec![1.0, -3.0, 3.0, 0.5]],
            4,
        )
        .unwrap();
        let t1 = wald_contrast_test(&fit, &l1).unwrap();
        let t2 = wald_contrast_test(&fit, &l2).unwrap();
        assert!((t1.statistic - t2.statistic).abs() < 1e-8);
    }

    #[test]
    fn contrast_on_boundary_parameter_is_rejected() {
        let data = OrdinalData::from_counts(
            vec![vec![-0.5], vec![0.5]],
            vec![vec![8, 6, 1, 0], vec![18, 1, 1, 0]],
        )
        .unwrap();
        let spec = ModelSpec::proportional(LinkFamily::Logit, 4, 1);
        let fit = fit_ml(&spec, &data, &FitControl::default()).unwrap();
        let contrast = ContrastMatrix::new(vec![vec![0.0, 0.0, 1.0, 0.0]], 4).unwrap();
        assert!(matches!(
            wald_contrast_test(&fit, &contrast),
            Err(Error::UndefinedEstimator(_))
        ));
    }

    #[test]
    fn adjusted_score_statistic_vanishes_at_unrestricted_optimum() {
        let data = interior_data();
        let spec = ModelSpec::proportional(LinkFamily::Logit, 4, 1);
        let rb = fit_rb(&spec, &data, &FitControl::default()).unwrap();
        // Embedding the full model's own optimum leaves no score to test.
        let test =
            adjusted_score_test(&spec, &data, &rb.delta_hat, spec.param_count() - 1).unwrap();
        assert!(test.statistic.abs() < 1e-16, "{}", test.statistic);
    }

    #[test]
    fn empirical_logit_matches_definition_and_boundaries() {
        // y = (1, 1): single cutpoint at log(1.5/1.5) = 0.
        assert_eq!(empirical_logit(&[1, 1]).unwrap(), vec![0.0]);
        // All mass in the last category: every transform is log{½/(m+½)}.
        let m = 7u64;
        let el = empirical_logit(&[0, 0, 0, m]).unwrap();
        let expected = (0.5 / (m as f64 + 0.5)).ln();
        for v in el {
            assert!((v - expected).abs() < 1e-12);
        }
        // Strictly increasing when the cumulative counts strictly increase.
        let el = empirical_logit(&[2, 3, 1, 4]).unwrap();
        assert!(el.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn gen_emp_logit_closed_form() {
        // Boundary cells stay finite.
        let v = gen_emp_logit_2x2(5, 5, 0, 7).unwrap();
        let expected = (5.5f64 / 0.5).ln() - (0.5f64 / 7.5).ln();
        assert!((v - expected).abs() < 1e-12);
        // Equal proportions at one half give zero.
        assert_eq!(gen_emp_logit_2x2(2, 4, 3, 6).unwrap(), 0.0);
        assert!(gen_emp_logit_2x2(6, 5, 0, 1).is_err());
    }

    #[test]
    fn empirical_logit_equals_intercept_only_rb_fit() {
        // Interior categories stay observed (an unobserved interior category
        // puts the estimate exactly on the cutpoint-ordering boundary); end
        // categories may be empty, which is the interesting finiteness case.
        let mut rng = StdRng::seed_from_u64(33);
        let mut checked = 0;
        for _ in 0..30 {
            let k: usize = rng.random_range(3..=6);
            let mut counts: Vec<u64> = (0..k).map(|_| rng.random_range(1..6)).collect();
            counts[0] = rng.random_range(0..6);
            counts[k - 1] = rng.random_range(0..6);
            let positive = counts.iter().filter(|&&c| c > 0).count();
            if positive < 2 {
                continue;
            }
            let data = OrdinalData::from_counts(vec![vec![]], vec![counts.clone()]).unwrap();
            let spec = ModelSpec::proportional(LinkFamily::Logit, k, 0);
            let rb = fit_rb(&spec, &data, &FitControl::default()).unwrap();
            let el = empirical_logit(&counts).unwrap();
            for (a, b) in rb.delta_hat.as_slice().iter().zip(&el) {
                assert!((a - b).abs() < 1e-8, "{a} vs {b} for counts {counts:?}");
            }
            checked += 1;
        }
        assert!(checked >= 15);
    }
}
