use alloc::vec::Vec;
use nalgebra::{ComplexField, DMatrix};

use super::{ensure_finite_complex, ensure_finite_real, ensure_square, ComplexMatrix, RealMatrix};
use crate::error::{Error, Result};

// Largest 1-norm for which the [m/m] Pade approximant of exp is accurate
// to double-precision unit roundoff (Higham 2005).
const PADE_DEGREES: [(usize, f64); 5] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068e0),
    (13, 5.371_920_351_148_152e0),
];

/// Coefficients of the [m/m] Pade numerator for exp.
fn pade_coefficients(m: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(m + 1);
    c.push(1.0);
    for k in 0..m {
        let next = c[k] * (m - k) as f64 / ((2 * m - k) as f64 * (k + 1) as f64);
        c.push(next);
    }
    c
}

pub(crate) fn norm1<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|x| x.clone().abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn expm_generic<T: ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(a.clone());
    }
    let ident = DMatrix::<T>::identity(n, n);
    let scal = |m: &DMatrix<T>, c: f64| m * T::from_real(c);
    let norm = norm1(a);

    let (m, squarings) = match PADE_DEGREES.iter().find(|(_, theta)| norm <= *theta) {
        Some(&(m, _)) => (m, 0u32),
        None => {
            let theta13 = PADE_DEGREES[4].1;
            let s = (norm / theta13).log2().ceil().max(0.0) as u32;
            (13, s)
        }
    };
    let a = scal(a, 0.5f64.powi(squarings as i32));
    let b = pade_coefficients(m);

    let a2 = &a * &a;
    let (u, v) = if m == 13 {
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let w = scal(&a6, b[13]) + scal(&a4, b[11]) + scal(&a2, b[9]);
        let w = &a6 * w + scal(&a6, b[7]) + scal(&a4, b[5]) + scal(&a2, b[3]) + scal(&ident, b[1]);
        let u = &a * w;
        let z = scal(&a6, b[12]) + scal(&a4, b[10]) + scal(&a2, b[8]);
        let v = &a6 * z + scal(&a6, b[6]) + scal(&a4, b[4]) + scal(&a2, b[2]) + scal(&ident, b[0]);
        (u, v)
    } else {
        // even powers A^0, A^2, ..., A^(m-1)
        let mut powers = Vec::with_capacity(m / 2 + 1);
        powers.push(ident.clone());
        for k in 1..=m / 2 {
            let next = &powers[k - 1] * &a2;
            powers.push(next);
        }
        let mut odd = DMatrix::<T>::zeros(n, n);
        let mut even = DMatrix::<T>::zeros(n, n);
        for (k, p) in powers.iter().enumerate() {
            odd += scal(p, b[2 * k + 1]);
            even += scal(p, b[2 * k]);
        }
        (&a * odd, even)
    };

    let denom = &v - &u;
    let numer = &v + &u;
    let mut r = denom
        .lu()
        .solve(&numer)
        .ok_or(Error::NumericalFailure("Pade denominator is singular"))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

/// Matrix exponential by scaling and squaring with a Pade approximant.
pub fn matrix_exp(l: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(l.nrows(), l.ncols())?;
    ensure_finite_complex(l, "matrix_exp input")?;
    let out = expm_generic(l)?;
    ensure_finite_complex(&out, "matrix_exp result")?;
    Ok(out)
}

/// Real-arithmetic variant of [`matrix_exp`].
pub fn matrix_exp_real(l: &RealMatrix) -> Result<RealMatrix> {
    ensure_square(l.nrows(), l.ncols())?;
    ensure_finite_real(l, "matrix_exp input")?;
    let out = expm_generic(l)?;
    ensure_finite_real(&out, "matrix_exp result")?;
    Ok(out)
}
