use nalgebra::SVD;

use super::{ensure_finite_real, RealMatrix};
use crate::error::{Error, Result};

const SVD_MAX_ITER: usize = 10_000;

/// `max(rows, cols) * eps`, the relative cutoff applied to `sigma_max`.
pub fn default_rel_tol(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

fn svd(a: &RealMatrix, vectors: bool) -> Result<SVD<f64, nalgebra::Dyn, nalgebra::Dyn>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::NumericalFailure("SVD of an empty matrix"));
    }
    ensure_finite_real(a, "SVD input")?;
    SVD::try_new(a.clone(), vectors, vectors, f64::EPSILON, SVD_MAX_ITER)
        .ok_or(Error::NumericalFailure("SVD did not converge"))
}

/// Moore-Penrose pseudo-inverse. Singular values below
/// `rel_tol * sigma_max` are treated as zero; `None` selects
/// [`default_rel_tol`].
pub fn pinv(a: &RealMatrix, rel_tol: Option<f64>) -> Result<RealMatrix> {
    let rel_tol = rel_tol.unwrap_or_else(|| default_rel_tol(a.nrows(), a.ncols()));
    if !(rel_tol >= 0.0) {
        return Err(Error::Config("pinv tolerance must be non-negative".into()));
    }
    let svd = svd(a, true)?;
    let u = svd.u.as_ref().ok_or(Error::NumericalFailure("SVD U"))?;
    let v_t = svd.v_t.as_ref().ok_or(Error::NumericalFailure("SVD V^T"))?;
    let sigma_max = svd.singular_values.max();
    let cutoff = rel_tol * sigma_max;

    // V * diag(1/sigma) * U^T, skipping truncated directions.
    let mut out = RealMatrix::zeros(a.ncols(), a.nrows());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff || s == 0.0 {
            continue;
        }
        let v_col = v_t.row(k).transpose();
        let u_col = u.column(k);
        out.ger(1.0 / s, &v_col, &u_col, 1.0);
    }
    Ok(out)
}

/// Ratio of the largest to smallest singular value; infinite for
/// rank-deficient input.
pub fn condition_number(a: &RealMatrix) -> Result<f64> {
    let svd = svd(a, false)?;
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    Ok(if min == 0.0 { f64::INFINITY } else { max / min })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_scalar() {
        let i3 = RealMatrix::identity(3, 3);
        assert_eq!(pinv(&i3, None).unwrap(), i3);
        let two = RealMatrix::from_element(1, 1, 2.0);
        assert!((pinv(&two, None).unwrap()[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tall_full_rank_left_inverse() {
        let a = RealMatrix::from_row_slice(
            5,
            3,
            &[
                0.3, -1.2, 0.7, 2.1, 0.4, -0.5, -0.8, 1.1, 1.9, 0.6, -0.3, 0.2, 1.4, 0.9, -1.7,
            ],
        );
        let p = pinv(&a, None).unwrap();
        assert_eq!(p.shape(), (3, 5));
        assert!((&p * &a - RealMatrix::identity(3, 3)).amax() < 1e-10);
    }

    #[test]
    fn rank_deficient_truncates() {
        // second column is twice the first
        let a = RealMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let p = pinv(&a, None).unwrap();
        assert!(p.iter().all(|x| x.is_finite()));
        assert!((&a * &p * &a - &a).amax() < 1e-12);
        assert!(condition_number(&a).unwrap() > 1e12);
    }

    #[test]
    fn empty_and_nonfinite_rejected() {
        assert!(pinv(&RealMatrix::zeros(0, 3), None).is_err());
        let bad = RealMatrix::from_element(2, 2, f64::NAN);
        assert_eq!(pinv(&bad, None), Err(Error::NonFinite("SVD input")));
    }
}
