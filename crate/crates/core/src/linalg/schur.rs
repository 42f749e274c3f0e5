use nalgebra::Schur;

use super::{Complex64, ComplexMatrix};
use crate::error::{Error, Result};

/// Complex Schur form `A = Q T Q*` with `T` upper triangular.
pub(crate) fn complex_schur(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = a.nrows();
    let max_iter = 1_000 * n.max(1);
    let (q, mut t) = Schur::try_new(a.clone(), f64::EPSILON, max_iter)
        .ok_or(Error::NumericalFailure(
            "complex Schur decomposition did not converge",
        ))?
        .unpack();
    let scale = t
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for j in 0..n {
        for i in (j + 1)..n {
            if t[(i, j)].norm() > 1e-10 * scale {
                return Err(Error::NumericalFailure("complex Schur form not triangular"));
            }
            t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((q, t))
}
