use alloc::boxed::Box;
use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("numerical failure in {0}")]
    NumericalFailure(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular ({0})")]
    Singular(&'static str),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("integration diverged at step {step}")]
    Divergence { step: usize },

    #[error("matrix is defective or its eigenvector basis is ill-conditioned (cond = {condition:e}); use the exp-log path")]
    Defective { condition: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("component {component}: {source}")]
    Component {
        component: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("data error in trajectory {trajectory}, component {component}: {reason}")]
    Data {
        trajectory: usize,
        component: usize,
        reason: String,
    },
}

impl Error {
    pub(crate) fn in_component(self, component: usize) -> Error {
        match self {
            e @ (Error::Component { .. } | Error::Data { .. }) => e,
            e => Error::Component {
                component,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
