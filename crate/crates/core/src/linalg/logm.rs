//! Principal matrix logarithm by inverse scaling and squaring on the
//! complex Schur form.
//!
//! The triangular factor is square-rooted until `||T - I||_1` drops below
//! the bound for a degree-8 Pade approximant of `log(I + X)`, which is
//! then evaluated in partial-fraction form with Gauss-Legendre nodes.
//! The diagonal and first superdiagonal are recomputed directly from the
//! eigenvalues to recover accuracy lost in the square roots.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // method calls resolve to std when it is linked
use num_traits::Float;

use super::expm::norm1;
use super::schur::complex_schur;
use super::{
    ensure_finite_complex, ensure_square, to_complex, Complex64, ComplexMatrix, RealMatrix,
};
use crate::error::{Error, Result};

const PADE_DEGREE: usize = 8;
// Al-Mohy & Higham (2012) bound for m = 8 at double precision.
const PADE_THETA: f64 = 0.367;
const MAX_SQRTS: usize = 100;

/// Principal logarithm plus a flag for eigenvalues on the closed negative
/// real axis, where the principal branch is genuinely complex even for a
/// real argument.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixLog {
    pub value: ComplexMatrix,
    pub negative_real_axis: bool,
}

pub fn matrix_log(k: &RealMatrix) -> Result<MatrixLog> {
    matrix_log_complex(&to_complex(k))
}

pub fn matrix_log_complex(k: &ComplexMatrix) -> Result<MatrixLog> {
    ensure_square(k.nrows(), k.ncols())?;
    ensure_finite_complex(k, "matrix_log input")?;
    let n = k.nrows();
    if n == 0 {
        return Err(Error::Singular("logarithm of an empty matrix"));
    }

    let (q, t) = complex_schur(k)?;
    let eig: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let scale = norm1(k).max(f64::MIN_POSITIVE);
    let singular_tol = n as f64 * f64::EPSILON * scale;
    if eig.iter().any(|z| z.norm() <= singular_tol) {
        return Err(Error::Singular("eigenvalue at zero has no logarithm"));
    }
    let negative_real_axis = eig
        .iter()
        .any(|z| z.re < 0.0 && z.im.abs() <= 1e-10 * z.norm());

    let r = log_upper_triangular(&t, &eig)?;
    let value = &q * r * q.adjoint();
    ensure_finite_complex(&value, "matrix_log result")?;
    Ok(MatrixLog {
        value,
        negative_real_axis,
    })
}

fn log_upper_triangular(t: &ComplexMatrix, eig: &[Complex64]) -> Result<ComplexMatrix> {
    let n = t.nrows();
    let ident = ComplexMatrix::identity(n, n);
    let mut root = t.clone();
    let mut sqrts = 0usize;
    while norm1(&(&root - &ident)) > PADE_THETA {
        if sqrts == MAX_SQRTS {
            return Err(Error::NumericalFailure(
                "inverse scaling did not reach the Pade region",
            ));
        }
        root = sqrt_upper_triangular(&root)?;
        sqrts += 1;
    }

    let x = &root - &ident;
    let (nodes, weights) = gauss_legendre_unit(PADE_DEGREE);
    let mut r = ComplexMatrix::zeros(n, n);
    for (&node, &w) in nodes.iter().zip(&weights) {
        // X (I + node X)^{-1}; the factors commute.
        let denom = &ident + &x * Complex64::new(node, 0.0);
        let term = denom
            .solve_upper_triangular(&x)
            .ok_or(Error::NumericalFailure("singular Pade denominator"))?;
        r += term * Complex64::new(w, 0.0);
    }
    r *= Complex64::new(2f64.powi(sqrts as i32), 0.0);

    for i in 0..n {
        r[(i, i)] = eig[i].ln();
    }
    for i in 0..n.saturating_sub(1) {
        r[(i, i + 1)] = log_superdiagonal(eig[i], eig[i + 1], t[(i, i + 1)]);
    }
    Ok(r)
}

/// Principal square root of an upper-triangular matrix.
fn sqrt_upper_triangular(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = t.nrows();
    let mut u = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        u[(i, i)] = t[(i, i)].sqrt();
    }
    for j in 1..n {
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for k in (i + 1)..j {
                s -= u[(i, k)] * u[(k, j)];
            }
            let d = u[(i, i)] + u[(j, j)];
            if d.norm() == 0.0 {
                return Err(Error::Singular(
                    "square root of a singular triangular factor",
                ));
            }
            u[(i, j)] = s / d;
        }
    }
    Ok(u)
}

// Unwinding number of z: the integer u with z = log(e^z) + 2*pi*i*u.
fn unwinding(z: Complex64) -> f64 {
    ((z.im - PI) / (2.0 * PI)).ceil()
}

/// (1,2) entry of log([[a, t12], [0, b]]) without cancellation when a ~ b.
fn log_superdiagonal(a: Complex64, b: Complex64, t12: Complex64) -> Complex64 {
    let (la, lb) = (a.ln(), b.ln());
    let diff = b - a;
    if diff.norm() == 0.0 {
        t12 / a
    } else if diff.norm() > 0.5 * a.norm().min(b.norm()) {
        t12 * (lb - la) / diff
    } else {
        let z = diff / (b + a);
        let u = unwinding(lb - la);
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        t12 * (z.atanh() * 2.0 + two_pi_i * u) / diff
    }
}

/// Gauss-Legendre nodes and weights mapped to [0, 1].
fn gauss_legendre_unit(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for i in 1..=m {
        let mut x = (PI * (i as f64 - 0.25) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_m(x) and P_m'(x)
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes.push(0.5 * (x + 1.0));
        weights.push(0.5 * w);
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cast_real, matrix_exp};

    #[test]
    fn quadrature_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre_unit(PADE_DEGREE);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        // degree 2m-1 is exact: integral of t^15 over [0,1] = 1/16
        let s: f64 = x.iter().zip(&w).map(|(t, w)| w * t.powi(15)).sum();
        assert!((s - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn identity_has_zero_log() {
        let l = matrix_log(&RealMatrix::identity(2, 2)).unwrap();
        assert!(l.value.iter().all(|z| z.norm() < 1e-15));
        assert!(!l.negative_real_axis);
    }

    #[test]
    fn diagonal_exponentials() {
        let e = core::f64::consts::E;
        let k = RealMatrix::from_row_slice(2, 2, &[e, 0.0, 0.0, e * e]);
        let l = cast_real(&matrix_log(&k).unwrap().value);
        assert!(l.max_imag < 1e-15);
        assert!((l.value[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((l.value[(1, 1)] - 2.0).abs() < 1e-14);
        assert!(l.value[(0, 1)].abs() < 1e-14);
    }

    #[test]
    fn rotation_log_is_real_skew() {
        let th = PI / 6.0;
        let k = RealMatrix::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
        let l = cast_real(&matrix_log(&k).unwrap().value);
        let want = RealMatrix::from_row_slice(2, 2, &[0.0, -th, th, 0.0]);
        assert!((&l.value - want).amax() < 1e-10);
        assert!(l.max_imag < 1e-10);
    }

    #[test]
    fn minus_one_gives_i_pi() {
        let l = matrix_log(&RealMatrix::from_element(1, 1, -1.0)).unwrap();
        assert!(l.negative_real_axis);
        assert!((cast_real(&l.value).max_imag - PI).abs() < 1e-15);
    }

    #[test]
    fn singular_rejected() {
        let k = RealMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(matrix_log(&k), Err(Error::Singular(_))));
    }

    #[test]
    fn jordan_block_close_eigenvalues() {
        // log([[a,1],[0,a]]) = [[ln a, 1/a],[0, ln a]]
        let a = 0.8;
        let k = RealMatrix::from_row_slice(2, 2, &[a, 1.0, 0.0, a]);
        let l = cast_real(&matrix_log(&k).unwrap().value);
        assert!((l.value[(0, 0)] - a.ln()).abs() < 1e-14);
        assert!((l.value[(0, 1)] - 1.0 / a).abs() < 1e-13);
    }

    #[test]
    fn large_norm_roundtrip() {
        let k =
            RealMatrix::from_row_slice(3, 3, &[40.0, 3.0, -2.0, 1.0, 0.02, 0.5, -7.0, 2.0, 15.0]);
        let l = matrix_log(&k).unwrap();
        let back = matrix_exp(&l.value).unwrap();
        let back = cast_real(&back).value;
        assert!((&back - &k).norm() / k.norm() < 1e-12);
    }
}
