use crate::linalg::RealMatrix;

/// Autonomous vector field `x' = F(x)` on R^n.
pub trait VectorField {
    fn dim(&self) -> usize;

    /// Writes `F(x)` into `dx`; both slices have length [`dim`](Self::dim).
    fn eval(&self, x: &[f64], dx: &mut [f64]);
}

impl<F: VectorField + ?Sized> VectorField for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, x: &[f64], dx: &mut [f64]) {
        (**self).eval(x, dx)
    }
}

/// Lorenz system `x1' = s(x2 - x1)`, `x2' = x1(r - x3) - x2`,
/// `x3' = x1 x2 - b x3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lorenz {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
}

impl Lorenz {
    pub fn new(sigma: f64, rho: f64, beta: f64) -> Self {
        Lorenz { sigma, rho, beta }
    }
}

/// The damped Lorenz benchmark (`s = 0.5`, `r = 0.75`, `b = 2`); the origin
/// is globally attracting for these parameters.
pub fn lorenz_field() -> Lorenz {
    Lorenz::new(0.5, 0.75, 2.0)
}

impl VectorField for Lorenz {
    fn dim(&self) -> usize {
        3
    }

    fn eval(&self, x: &[f64], dx: &mut [f64]) {
        dx[0] = self.sigma * (x[1] - x[0]);
        dx[1] = x[0] * (self.rho - x[2]) - x[1];
        dx[2] = x[0] * x[1] - self.beta * x[2];
    }
}

/// Linear field `x' = A x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearField {
    pub a: RealMatrix,
}

impl LinearField {
    pub fn new(a: RealMatrix) -> Self {
        assert!(a.is_square(), "linear field needs a square matrix");
        LinearField { a }
    }
}

impl VectorField for LinearField {
    fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn eval(&self, x: &[f64], dx: &mut [f64]) {
        for (i, out) in dx.iter_mut().enumerate() {
            *out = self.a.row(i).iter().zip(x).map(|(a, x)| a * x).sum();
        }
    }
}

/// Field backed by a closure.
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnField<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnField { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> VectorField for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64], dx: &mut [f64]) {
        (self.f)(x, dx)
    }
}
