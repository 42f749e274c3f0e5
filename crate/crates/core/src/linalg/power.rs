use alloc::vec::Vec;
use nalgebra::SVD;

use super::schur::complex_schur;
use super::{ensure_finite_real, ensure_square, to_complex, Complex64, ComplexMatrix, RealMatrix};
use crate::error::{Error, Result};

/// Eigenvector matrices more ill-conditioned than this are treated as
/// defective.
const MAX_EIGENBASIS_CONDITION: f64 = 1e10;

/// `K^p` through the eigendecomposition `K = V diag(lambda) V^-1` with
/// principal scalar powers.
///
/// Fails with [`Error::Defective`] when `K` lacks a well-conditioned
/// eigenbasis; callers fall back to `exp(p log K)`.
pub fn fractional_power(k: &RealMatrix, p: f64) -> Result<ComplexMatrix> {
    ensure_square(k.nrows(), k.ncols())?;
    ensure_finite_real(k, "fractional_power input")?;
    let n = k.nrows();
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let (q, t) = complex_schur(&to_complex(k))?;
    let eig: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tiny = n as f64 * f64::EPSILON * scale;

    // Eigenvectors of T by back substitution, column j for eigenvalue j.
    let mut y = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        y[(j, j)] = Complex64::new(1.0, 0.0);
        for i in (0..j).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for l in (i + 1)..=j {
                s += t[(i, l)] * y[(l, j)];
            }
            let d = eig[j] - eig[i];
            y[(i, j)] = if d.norm() > tiny {
                s / d
            } else if s.norm() <= tiny {
                Complex64::new(0.0, 0.0)
            } else {
                return Err(Error::Defective {
                    condition: f64::INFINITY,
                });
            };
        }
        let norm = y.column(j).norm();
        y.column_mut(j).unscale_mut(norm);
    }
    let v = &q * y;

    let sv = SVD::try_new(v.clone(), false, false, f64::EPSILON, 10_000)
        .ok_or(Error::NumericalFailure("SVD did not converge"))?
        .singular_values;
    let condition = sv.max() / sv.min();
    if !(condition <= MAX_EIGENBASIS_CONDITION) {
        return Err(Error::Defective { condition });
    }
    let v_inv = v.clone().try_inverse().ok_or(Error::Defective {
        condition: f64::INFINITY,
    })?;

    let mut scaled = v;
    for (j, lambda) in eig.iter().enumerate() {
        if lambda.norm() == 0.0 && p <= 0.0 {
            return Err(Error::Singular("non-positive power of a singular matrix"));
        }
        let lp = if lambda.norm() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            lambda.powf(p)
        };
        for i in 0..n {
            scaled[(i, j)] *= lp;
        }
    }
    Ok(scaled * v_inv)
}
