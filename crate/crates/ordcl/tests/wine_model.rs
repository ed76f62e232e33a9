//! Fits of the wine bitterness data: a partial proportional-odds model with
//! category-specific temperature effects and a proportional contact effect.

use ordcl::estimation::{fit_bc, fit_ml, fit_rb, BoundaryFlag, FitControl};
use ordcl::inference::{
    adjusted_score_test, embed_restricted, wald_contrast_test, wald_z, ContrastMatrix,
};
use ordcl::links::LinkFamily;
use ordcl::model::{ModelSpec, OrdinalData};
use ordcl::Error;

fn wine_data() -> OrdinalData {
    // Rows: (temperature, contact) with bitterness counts over 5 categories.
    OrdinalData::from_counts(
        vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
        ],
        vec![
            vec![4, 9, 5, 0, 0],
            vec![1, 7, 8, 2, 0],
            vec![0, 5, 8, 3, 2],
            vec![0, 1, 5, 7, 5],
        ],
    )
    .unwrap()
}

fn wine_spec() -> ModelSpec {
    ModelSpec::new(LinkFamily::Logit, 5, vec![1], vec![0])
        .unwrap()
        .with_names(vec!["temp".into(), "contact".into()])
}

#[test]
fn wine_ml_reproduces_finite_estimates_and_flags() {
    let fit = fit_ml(&wine_spec(), &wine_data(), &FitControl::default()).unwrap();
    assert!(fit.converged);
    let est = fit.delta_hat.as_slice();
    let se = fit.se();
    // alpha_1..alpha_3, beta_2, beta_3, theta finite per the published fit.
    let finite = [(0, -1.27), (1, 1.10), (2, 3.77), (5, 2.15), (6, 2.87), (8, 1.47)];
    let finite_se = [(0, 0.51), (1, 0.44), (2, 0.80), (5, 0.59), (6, 0.82), (8, 0.47)];
    for (t, expected) in finite {
        assert!(
            (est[t] - expected).abs() < 0.01,
            "param {t}: {} vs {expected}",
            est[t]
        );
    }
    for (t, expected) in finite_se {
        assert!(
            (se[t] - expected).abs() < 0.01,
            "se {t}: {} vs {expected}",
            se[t]
        );
    }
    // alpha_4, beta_1, beta_4 diverge.
    for t in [3, 4, 7] {
        assert_eq!(fit.boundary_flags[t], BoundaryFlag::Diverging, "param {t}");
    }
    // Z statistics of the diverging parameters collapse to zero.
    let z = wald_z(&fit);
    for t in [3, 4, 7] {
        assert!(z[t].z.abs() < 0.01, "z for param {t}: {}", z[t].z);
    }
    assert!((z[8].z - 3.13).abs() < 0.02, "theta z: {}", z[8].z);
}

#[test]
fn wine_rb_reproduces_published_table() {
    let fit = fit_rb(&wine_spec(), &wine_data(), &FitControl::default()).unwrap();
    let expected = [-1.19, 1.06, 3.50, 5.20, 2.62, 2.05, 2.65, 2.96, 1.40];
    let expected_se = [0.50, 0.44, 0.74, 1.47, 1.52, 0.58, 0.75, 1.50, 0.46];
    let est = fit.delta_hat.as_slice();
    let se = fit.se();
    for t in 0..9 {
        assert!(
            (est[t] - expected[t]).abs() < 0.01,
            "param {t}: {} vs {}",
            est[t],
            expected[t]
        );
        assert!(
            (se[t] - expected_se[t]).abs() < 0.01,
            "se {t}: {} vs {}",
            se[t],
            expected_se[t]
        );
    }
    assert!(!fit.has_boundary());
    let z = wald_z(&fit);
    assert!((z[4].z - 1.72).abs() < 0.02, "beta_1 z: {}", z[4].z);
    assert!((z[8].z - 3.02).abs() < 0.02, "theta z: {}", z[8].z);
}

#[test]
fn wine_proportionality_wald_test() {
    let spec = wine_spec();
    let fit = fit_rb(&spec, &wine_data(), &FitControl::default()).unwrap();
    // Equality of the four temperature coefficients (columns 4..8).
    let contrast = ContrastMatrix::equal_coefficients(4, 4, 9).unwrap();
    let test = wald_contrast_test(&fit, &contrast).unwrap();
    assert!(
        (test.statistic - 0.7502).abs() < 1e-3,
        "W = {}",
        test.statistic
    );
    assert_eq!(test.df, 3);
    assert!((test.p_value - 0.861).abs() < 1e-3, "p = {}", test.p_value);
}

#[test]
fn wine_adjusted_score_test() {
    // Small model: both covariates proportional; large: temperature partial.
    let small = ModelSpec::new(LinkFamily::Logit, 5, vec![0, 1], vec![])
        .unwrap()
        .with_names(vec!["temp".into(), "contact".into()]);
    let rb_small = fit_rb(&small, &wine_data(), &FitControl::default()).unwrap();
    // Large-model layout: alpha_1..4, temp[1..4], contact.
    // Small-model layout: alpha_1..4, temp, contact.
    let map = vec![0, 1, 2, 3, 4, 4, 4, 4, 5];
    let large = wine_spec();
    let restricted = embed_restricted(rb_small.delta_hat.as_slice(), &map, 9).unwrap();
    let test = adjusted_score_test(&large, &wine_data(), &restricted, 6).unwrap();
    assert!(
        (test.statistic - 0.9357).abs() < 1e-3,
        "statistic = {}",
        test.statistic
    );
    assert_eq!(test.df, 3);
    assert!((test.p_value - 0.8168).abs() < 1e-3, "p = {}", test.p_value);
}

#[test]
fn wine_bias_correction_is_undefined() {
    match fit_bc(&wine_spec(), &wine_data(), &FitControl::default()) {
        Err(Error::UndefinedEstimator(_)) => {}
        other => panic!("expected undefined estimator, got {other:?}"),
    }
}
