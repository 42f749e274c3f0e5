use alloc::vec;
use alloc::vec::Vec;

use super::VectorField;
use crate::error::{Error, Result};

/// States on a uniform grid `t = j * step`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTrajectory {
    pub step: f64,
    pub dim: usize,
    states: Vec<f64>,
}

impl DenseTrajectory {
    pub fn len(&self) -> usize {
        self.states.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// State at grid index `j`.
    pub fn state(&self, j: usize) -> &[f64] {
        &self.states[j * self.dim..(j + 1) * self.dim]
    }

    pub fn last(&self) -> &[f64] {
        self.state(self.len() - 1)
    }
}

/// One classical fourth-order Runge-Kutta step, in place.
pub fn rk4_step<F: VectorField + ?Sized>(
    field: &F,
    x: &mut [f64],
    h: f64,
    scratch: &mut [Vec<f64>; 5],
) {
    let [k1, k2, k3, k4, tmp] = scratch;
    field.eval(x, k1);
    for i in 0..x.len() {
        tmp[i] = x[i] + 0.5 * h * k1[i];
    }
    field.eval(tmp, k2);
    for i in 0..x.len() {
        tmp[i] = x[i] + 0.5 * h * k2[i];
    }
    field.eval(tmp, k3);
    for i in 0..x.len() {
        tmp[i] = x[i] + h * k3[i];
    }
    field.eval(tmp, k4);
    for i in 0..x.len() {
        x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Fixed-step RK4 from `x0`, returning the states at `0, h, ..., n_steps h`.
pub fn integrate<F: VectorField + ?Sized>(
    field: &F,
    x0: &[f64],
    h: f64,
    n_steps: usize,
) -> Result<DenseTrajectory> {
    let n = field.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config("integration step must be positive".into()));
    }
    let mut states = Vec::with_capacity(n * (n_steps + 1));
    states.extend_from_slice(x0);
    let mut x = x0.to_vec();
    let mut scratch = [
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
    ];
    for step in 1..=n_steps {
        rk4_step(field, &mut x, h, &mut scratch);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step });
        }
        states.extend_from_slice(&x);
    }
    Ok(DenseTrajectory {
        step: h,
        dim: n,
        states,
    })
}
