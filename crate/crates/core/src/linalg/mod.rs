//! Dense matrix kernels: pseudo-inverse, spectra, principal logarithm,
//! exponential, fractional powers and eigenvalue matching.

mod assignment;
mod cast;
mod eig;
mod expm;
mod logm;
mod pinv;
mod power;
mod schur;

use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::DMatrix;
pub use num_complex::Complex;

pub use assignment::{min_cost_assignment, spectrum_distance};
pub use cast::{cast_real, RealCast};
pub use eig::{eigenvalues, eigenvalues_complex};
pub use expm::{matrix_exp, matrix_exp_real};
pub use logm::{matrix_log, matrix_log_complex, MatrixLog};
pub use pinv::{condition_number, default_rel_tol, pinv};
pub use power::fractional_power;

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;
pub type RealMatrix = DMatrix<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;

/// Eigenvalue multiset of a square matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Spectrum(Vec<Complex64>);

impl Spectrum {
    pub fn new(eigenvalues: Vec<Complex64>) -> Self {
        Spectrum(eigenvalues)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex64> {
        self.0.iter()
    }

    /// Copy ordered by real part, then imaginary part.
    pub fn sorted(&self) -> Spectrum {
        let mut v = self.0.clone();
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap_or(Ordering::Equal)
                .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
        });
        Spectrum(v)
    }

    /// True when every eigenvalue has a conjugate partner within `tol`,
    /// with partners used at most once.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        let mut used = alloc::vec![false; self.0.len()];
        for (i, z) in self.0.iter().enumerate() {
            if used[i] {
                continue;
            }
            if z.im.abs() <= tol {
                used[i] = true;
                continue;
            }
            let partner = (0..self.0.len())
                .find(|&j| j != i && !used[j] && (self.0[j] - z.conj()).norm() <= tol);
            match partner {
                Some(j) => {
                    used[i] = true;
                    used[j] = true;
                }
                None => return false,
            }
        }
        true
    }
}

impl From<Vec<Complex64>> for Spectrum {
    fn from(v: Vec<Complex64>) -> Self {
        Spectrum(v)
    }
}

pub fn to_complex(m: &RealMatrix) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub(crate) fn ensure_finite_real(m: &RealMatrix, what: &'static str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub(crate) fn ensure_finite_complex(m: &ComplexMatrix, what: &'static str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub(crate) fn ensure_square(rows: usize, cols: usize) -> Result<()> {
    if rows == cols {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: rows,
            found: cols,
        })
    }
}
