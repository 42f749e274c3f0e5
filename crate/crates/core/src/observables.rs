//! Monomial dictionaries for lifting states into observable space.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::linalg::RealMatrix;

/// Ordered set of monomials `x^alpha` on R^n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    dim: usize,
    exponents: Vec<Vec<u32>>,
}

/// All monomials of total degree `<= degree` in graded lexicographic order
/// (`1, x1, x2, ..., x1^2, x1 x2, ...`). With `include_constant = false`
/// the constant monomial is dropped.
pub fn monomial_dictionary(n: usize, degree: u32, include_constant: bool) -> Result<Dictionary> {
    if n == 0 {
        return Err(Error::Config(
            "dictionary needs state dimension >= 1".into(),
        ));
    }
    let mut exponents = Vec::new();
    let start = if include_constant { 0 } else { 1 };
    for d in start..=degree {
        let mut alpha = vec![0u32; n];
        push_degree(&mut exponents, &mut alpha, 0, d);
    }
    Dictionary::from_exponents(n, exponents)
}

// Exponent vectors of total degree `remaining` over axes `axis..`,
// larger powers of earlier axes first.
fn push_degree(out: &mut Vec<Vec<u32>>, alpha: &mut [u32], axis: usize, remaining: u32) {
    if axis == alpha.len() - 1 {
        alpha[axis] = remaining;
        out.push(alpha.to_vec());
        alpha[axis] = 0;
        return;
    }
    for p in (0..=remaining).rev() {
        alpha[axis] = p;
        push_degree(out, alpha, axis + 1, remaining - p);
    }
    alpha[axis] = 0;
}

impl Dictionary {
    pub fn from_exponents(dim: usize, exponents: Vec<Vec<u32>>) -> Result<Self> {
        for (i, a) in exponents.iter().enumerate() {
            if a.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: a.len(),
                });
            }
            if exponents[..i].contains(a) {
                return Err(Error::Config(format!("duplicate monomial {a:?}")));
            }
        }
        Ok(Dictionary { dim, exponents })
    }

    /// The `n` coordinate functions only (plain DMD lifting).
    pub fn coordinates(n: usize) -> Result<Self> {
        monomial_dictionary(n, 1, false)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn index_of(&self, alpha: &[u32]) -> Option<usize> {
        self.exponents.iter().position(|a| a == alpha)
    }

    pub fn evaluate_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.dim, "state dimension mismatch");
        for (slot, alpha) in out.iter_mut().zip(&self.exponents) {
            *slot = alpha
                .iter()
                .zip(x)
                .fold(1.0, |acc, (&p, &xi)| acc * pow(xi, p));
        }
    }

    /// Lifted vector `Phi(x)` in dictionary order.
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.evaluate_into(x, &mut out);
        out
    }

    /// Selector `C` (n x N) with `C Phi(x) = x`, picking the degree-one slots.
    pub fn coordinate_readout(&self) -> Result<RealMatrix> {
        let mut c = RealMatrix::zeros(self.dim, self.len());
        for i in 0..self.dim {
            let mut e = vec![0u32; self.dim];
            e[i] = 1;
            let j = self.index_of(&e).ok_or_else(|| {
                Error::Config(format!(
                    "dictionary has no coordinate function for x{}",
                    i + 1
                ))
            })?;
            c[(i, j)] = 1.0;
        }
        Ok(c)
    }

    /// One exponent vector per line, space separated.
    pub fn manifest(&self) -> String {
        let mut s = String::new();
        for alpha in &self.exponents {
            let line: Vec<String> = alpha.iter().map(|p| format!("{p}")).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }
}

fn pow(x: f64, p: u32) -> f64 {
    (0..p).fold(1.0, |acc, _| acc * x)
}
