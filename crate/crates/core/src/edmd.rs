//! Extended DMD on snapshot pairs: least-squares Koopman matrix, its
//! generator via the principal logarithm, spectra and lifted rollout.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{
    cast_real, eigenvalues, matrix_exp, matrix_log, pinv, Complex64, ComplexMatrix, RealMatrix,
    Spectrum,
};
use crate::observables::Dictionary;
use crate::warning::Warning;

/// Generator realness residual above which a warning is recorded.
pub const GENERATOR_REALNESS_TOL: f64 = 1e-8;
/// Propagator realness residual above which a warning is recorded.
pub const PROPAGATOR_REALNESS_TOL: f64 = 1e-6;

/// Where a reconstructed state component came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Measured,
    Estimated,
}

/// Snapshot pairs `y_k = S^step(x_k)`, stored as `n x K` column matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePairEnsemble {
    pub current: RealMatrix,
    pub next: RealMatrix,
    pub step: f64,
    /// Per component: provenance of the `current` and `next` values.
    pub provenance: Vec<(Source, Source)>,
}

impl StatePairEnsemble {
    /// Pairs with every component marked as measured.
    pub fn measured(current: RealMatrix, next: RealMatrix, step: f64) -> Result<Self> {
        if current.shape() != next.shape() {
            return Err(Error::DimensionMismatch {
                expected: current.ncols(),
                found: next.ncols(),
            });
        }
        let n = current.nrows();
        Ok(StatePairEnsemble {
            current,
            next,
            step,
            provenance: alloc::vec![(Source::Measured, Source::Measured); n],
        })
    }

    pub fn dim(&self) -> usize {
        self.current.nrows()
    }

    pub fn len(&self) -> usize {
        self.current.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.current.ncols() == 0
    }
}

/// Lifted data matrices `P_x`, `P_y` (N x K): column k is `Phi` of pair k.
pub fn build_edmd_matrices(
    ens: &StatePairEnsemble,
    dict: &Dictionary,
) -> Result<(RealMatrix, RealMatrix)> {
    if ens.dim() != dict.dim() {
        return Err(Error::DimensionMismatch {
            expected: dict.dim(),
            found: ens.dim(),
        });
    }
    let lift = |m: &RealMatrix| {
        let mut p = RealMatrix::zeros(dict.len(), m.ncols());
        let mut buf = alloc::vec![0.0; dict.len()];
        for k in 0..m.ncols() {
            let x: Vec<f64> = m.column(k).iter().copied().collect();
            dict.evaluate_into(&x, &mut buf);
            p.column_mut(k).copy_from_slice(&buf);
        }
        p
    };
    Ok((lift(&ens.current), lift(&ens.next)))
}

/// Warning for fewer snapshot pairs than observables. The fitted matrix
/// is then rank deficient and has no logarithm, so callers check this
/// before fitting.
pub fn snapshot_count_warning(px: &RealMatrix) -> Option<Warning> {
    (px.ncols() < px.nrows()).then(|| Warning::Underdetermined {
        pairs: px.ncols(),
        observables: px.nrows(),
    })
}

/// Finite Koopman model on a dictionary.
#[derive(Debug, Clone, PartialEq)]
pub struct KoopmanModel {
    pub dictionary: Dictionary,
    /// One-step matrix for `step`.
    pub koopman: RealMatrix,
    /// Real part of the generator `log(K)/step_of_data`.
    pub generator: RealMatrix,
    pub generator_complex: ComplexMatrix,
    /// Largest imaginary magnitude dropped from the generator.
    pub generator_residual: f64,
    pub step: f64,
    pub readout: Option<RealMatrix>,
    pub warnings: Vec<Warning>,
}

/// `K = P_y P_x^+` and `L = log(K) / step`.
pub fn fit_koopman(
    dict: &Dictionary,
    px: &RealMatrix,
    py: &RealMatrix,
    step: f64,
) -> Result<KoopmanModel> {
    if px.shape() != py.shape() {
        return Err(Error::DimensionMismatch {
            expected: px.ncols(),
            found: py.ncols(),
        });
    }
    if px.nrows() != dict.len() {
        return Err(Error::DimensionMismatch {
            expected: dict.len(),
            found: px.nrows(),
        });
    }
    if !(step > 0.0) {
        return Err(Error::Config("model step must be positive".into()));
    }
    let mut warnings = Vec::new();
    let koopman = py * pinv(px, None)?;
    let log = matrix_log(&koopman)?;
    if log.negative_real_axis {
        warnings.push(Warning::NegativeRealEigenvalue {
            eigenvalue_re: most_negative_real(&koopman),
        });
    }
    let generator_complex = log.value / Complex64::new(step, 0.0);
    let cast = cast_real(&generator_complex);
    if cast.max_imag > GENERATOR_REALNESS_TOL {
        warnings.push(Warning::ImaginaryResidual {
            residual: cast.max_imag,
        });
    }
    Ok(KoopmanModel {
        readout: dict.coordinate_readout().ok(),
        dictionary: dict.clone(),
        koopman,
        generator: cast.value,
        generator_complex,
        generator_residual: cast.max_imag,
        step,
        warnings,
    })
}

pub(crate) fn most_negative_real(k: &RealMatrix) -> f64 {
    eigenvalues(k)
        .map(|s| {
            s.iter()
                .filter(|z| z.im.abs() <= 1e-10 * z.norm())
                .map(|z| z.re)
                .fold(0.0, f64::min)
        })
        .unwrap_or(f64::NAN)
}

impl KoopmanModel {
    /// Same generator, one-step matrix re-derived as `exp(L * step)`.
    pub fn resampled(&self, step: f64) -> Result<KoopmanModel> {
        if !(step > 0.0) {
            return Err(Error::Config("model step must be positive".into()));
        }
        let prop = matrix_exp(&(&self.generator_complex * Complex64::new(step, 0.0)))?;
        let cast = cast_real(&prop);
        let mut warnings = self.warnings.clone();
        if cast.max_imag > PROPAGATOR_REALNESS_TOL {
            warnings.push(Warning::ImaginaryResidual {
                residual: cast.max_imag,
            });
        }
        Ok(KoopmanModel {
            koopman: cast.value,
            step,
            warnings,
            ..self.clone()
        })
    }

    /// Eigenvalues of the real generator.
    pub fn generator_spectrum(&self) -> Result<Spectrum> {
        eigenvalues(&self.generator)
    }

    /// Eigenvalues of the one-step matrix.
    pub fn koopman_spectrum(&self) -> Result<Spectrum> {
        eigenvalues(&self.koopman)
    }
}

pub fn generator_spectrum(model: &KoopmanModel) -> Result<Spectrum> {
    model.generator_spectrum()
}

/// How states are propagated through the lifted model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rollout {
    /// `z <- K z` from `z0 = Phi(x0)`, reading `x = C z`.
    #[default]
    Lifted,
    /// Re-lift the read-out state before every step.
    Relift,
}

/// Predicted states at `step, 2 step, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub states: Vec<Vec<f64>>,
    /// Step at which a non-finite value appeared; `states` stops before it.
    pub diverged_at: Option<usize>,
}

pub fn predict(
    model: &KoopmanModel,
    x0: &[f64],
    steps: usize,
    rollout: Rollout,
) -> Result<Prediction> {
    let dict = &model.dictionary;
    if x0.len() != dict.dim() {
        return Err(Error::DimensionMismatch {
            expected: dict.dim(),
            found: x0.len(),
        });
    }
    let readout = model.readout.as_ref().ok_or_else(|| {
        Error::Config("dictionary lacks coordinate functions; cannot read out states".into())
    })?;
    let mut z = nalgebra::DVector::from_vec(dict.evaluate(x0));
    let mut states = Vec::with_capacity(steps);
    for j in 1..=steps {
        z = &model.koopman * &z;
        let x = readout * &z;
        if x.iter().chain(z.iter()).any(|v| !v.is_finite()) {
            return Ok(Prediction {
                states,
                diverged_at: Some(j),
            });
        }
        let x: Vec<f64> = x.iter().copied().collect();
        if rollout == Rollout::Relift {
            z = nalgebra::DVector::from_vec(dict.evaluate(&x));
        }
        states.push(x);
    }
    Ok(Prediction {
        states,
        diverged_at: None,
    })
}
