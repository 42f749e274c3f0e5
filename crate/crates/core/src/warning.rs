use core::fmt;

/// Non-fatal diagnostics raised while fitting or estimating.
///
/// Pipelines collect these with stage context instead of aborting.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// A matrix logarithm was taken of a matrix with an eigenvalue on the
    /// closed negative real axis; the principal log is genuinely complex.
    NegativeRealEigenvalue { eigenvalue_re: f64 },
    /// Imaginary part discarded when casting a complex result to real.
    ImaginaryResidual { residual: f64 },
    /// Condition number of a Hankel data matrix above the guard.
    IllConditioned { condition: f64 },
    /// Fewer snapshot pairs than observables.
    Underdetermined { pairs: usize, observables: usize },
    /// Estimation time before the first measurement.
    BeforeFirstSample { time: f64, dead_time: f64 },
    /// Estimation time far beyond the sampled window.
    Extrapolation { ratio: f64 },
    /// Prediction produced non-finite values and was truncated.
    PredictionDiverged { step: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::NegativeRealEigenvalue { eigenvalue_re } => write!(
                f,
                "eigenvalue {eigenvalue_re} on the closed negative real axis; principal log is complex"
            ),
            Warning::ImaginaryResidual { residual } => {
                write!(f, "discarded imaginary residual {residual:e}")
            }
            Warning::IllConditioned { condition } => {
                write!(f, "data matrix condition number {condition:e} exceeds 1e12")
            }
            Warning::Underdetermined { pairs, observables } => write!(
                f,
                "{pairs} snapshot pairs for {observables} observables; least squares is underdetermined"
            ),
            Warning::BeforeFirstSample { time, dead_time } => {
                write!(f, "estimate at t={time} precedes first sample at {dead_time}")
            }
            Warning::Extrapolation { ratio } => {
                write!(f, "extrapolating {ratio:.3}x beyond the sampled window")
            }
            Warning::PredictionDiverged { step } => {
                write!(f, "prediction diverged at step {step}; truncated")
            }
        }
    }
}
