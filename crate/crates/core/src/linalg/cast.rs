use super::{ComplexMatrix, RealMatrix};

/// Real part of a complex matrix with the largest discarded imaginary
/// magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct RealCast {
    pub value: RealMatrix,
    pub max_imag: f64,
}

impl RealCast {
    pub fn is_real(&self, tol: f64) -> bool {
        self.max_imag <= tol
    }
}

pub fn cast_real(m: &ComplexMatrix) -> RealCast {
    let max_imag = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    RealCast {
        value: m.map(|z| z.re),
        max_imag,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::to_complex;

    #[test]
    fn real_input_has_zero_residual() {
        let m = RealMatrix::from_row_slice(2, 2, &[1.0, -2.0, 3.5, 0.0]);
        let c = cast_real(&to_complex(&m));
        assert_eq!(c.value, m);
        assert_eq!(c.max_imag, 0.0);
        assert!(c.is_real(0.0));
    }
}
