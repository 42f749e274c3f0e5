use alloc::vec::Vec;
use nalgebra::Schur;

use super::schur::complex_schur;
use super::{
    ensure_finite_complex, ensure_finite_real, ensure_square, ComplexMatrix, RealMatrix, Spectrum,
};
use crate::error::{Error, Result};

/// Eigenvalues of a real square matrix from its real Schur form.
///
/// Complex eigenvalues come from 2x2 diagonal blocks and are therefore
/// exact conjugate pairs.
pub fn eigenvalues(a: &RealMatrix) -> Result<Spectrum> {
    ensure_square(a.nrows(), a.ncols())?;
    ensure_finite_real(a, "eigenvalue input")?;
    if a.nrows() == 0 {
        return Ok(Spectrum::default());
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 1_000 * a.nrows())
        .ok_or(Error::NumericalFailure("QR iteration did not converge"))?;
    Ok(Spectrum::new(
        schur.complex_eigenvalues().iter().copied().collect(),
    ))
}

/// Eigenvalues of a complex square matrix (diagonal of its Schur form).
pub fn eigenvalues_complex(a: &ComplexMatrix) -> Result<Spectrum> {
    ensure_square(a.nrows(), a.ncols())?;
    ensure_finite_complex(a, "eigenvalue input")?;
    let (_, t) = complex_schur(a)?;
    Ok(Spectrum::new(
        (0..t.nrows()).map(|i| t[(i, i)]).collect::<Vec<_>>(),
    ))
}
