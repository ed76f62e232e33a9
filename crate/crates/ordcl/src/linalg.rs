//! Small dense linear algebra helpers for the Fisher information.
//!
//! The information matrices here are tiny (d is rarely above a few dozen),
//! so everything goes through an SVD: it is pivot-safe for the nearly
//! singular matrices that arise next to boundary estimates and exposes the
//! scaled-singular-value threshold used to declare singularity.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff used when a genuinely invertible matrix is
/// required (adjustments, bias terms, test statistics).
pub const DEFAULT_RCOND: f64 = 1e-10;

/// Looser cutoff used when reporting variance estimates at boundary fits,
/// where the information is nearly singular by construction and the inflated
/// standard errors are themselves the diagnostic.
pub const REPORTING_RCOND: f64 = 1e-14;

fn svd(m: &DMatrix<f64>) -> nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn> {
    m.clone().svd(true, true)
}

fn check_cond(
    sv: &nalgebra::DVector<f64>,
    rcond: f64,
    context: &str,
) -> Result<f64> {
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(smax > 0.0) || smin < rcond * smax || !smin.is_finite() {
        return Err(Error::SingularInformation(format!(
            "{context}: smallest scaled singular value {:.3e} below {rcond:.0e}",
            if smax > 0.0 { smin / smax } else { 0.0 }
        )));
    }
    Ok(smax)
}

/// Solves `m x = b` for symmetric `m`, failing when the scaled spectrum
/// drops below `rcond`.
pub fn solve(m: &DMatrix<f64>, b: &DVector<f64>, rcond: f64, context: &str) -> Result<DVector<f64>> {
    let dec = svd(m);
    check_cond(&dec.singular_values, rcond, context)?;
    dec.solve(b, 0.0)
        .map_err(|e| Error::SingularInformation(format!("{context}: {e}")))
}

/// Inverse of a symmetric matrix with the same conditioning check.
pub fn inverse(m: &DMatrix<f64>, rcond: f64, context: &str) -> Result<DMatrix<f64>> {
    let dec = svd(m);
    check_cond(&dec.singular_values, rcond, context)?;
    dec.pseudo_inverse(0.0)
        .map_err(|e| Error::SingularInformation(format!("{context}: {e}")))
}

/// Returns the index of a linearly dependent column if the matrix does not
/// have full column rank.
pub fn deficient_column(m: &DMatrix<f64>) -> Option<usize> {
    let d = m.ncols();
    let dec = svd(m);
    let sv = &dec.singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    let tol = smax * 1e-10;
    let rank = sv.iter().filter(|&&s| s > tol).count();
    if rank >= d {
        return None;
    }
    // The right singular vector of the smallest singular value spans the
    // null space; its largest component names the offending column.
    let v_t = dec.v_t.as_ref()?;
    let null_row = v_t.row(v_t.nrows() - 1);
    (0..d).max_by(|&a, &b| {
        null_row[a]
            .abs()
            .partial_cmp(&null_row[b].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let b = DVector::from_row_slice(&[1.0, 2.0]);
        let x = solve(&m, &b, DEFAULT_RCOND, "test").unwrap();
        let r = &m * &x - &b;
        assert!(r.norm() < 1e-12);
    }

    #[test]
    fn rejects_singular_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let b = DVector::from_row_slice(&[1.0, 2.0]);
        assert!(solve(&m, &b, DEFAULT_RCOND, "test").is_err());
    }

    #[test]
    fn finds_dependent_column() {
        // Third column equals the first.
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[1.0, 0.0, 1.0, 2.0, 1.0, 2.0, 3.0, 5.0, 3.0],
        );
        let dep = deficient_column(&m).unwrap();
        assert!(dep == 0 || dep == 2);
        let full = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert!(deficient_column(&full).is_none());
    }
}
