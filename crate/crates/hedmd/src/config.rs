//! JSON experiment configuration.

use std::fmt;
use std::path::Path;

use hedmd_core::dynamics::{LinearField, Lorenz, VectorField};
use hedmd_core::edmd::Rollout;
use hedmd_core::hankel::EstimationPath;
use hedmd_core::linalg::RealMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Multirate,
    SingleState,
}

/// A named model in a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Full measurements at `T_s` and `2 T_s`.
    Ideal,
    Multirate,
    /// Full-state pairs `x(0), x(M T_s)`.
    Lcm,
    SingleState,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Ideal => "ideal",
            Method::Multirate => "multirate",
            Method::Lcm => "lcm",
            Method::SingleState => "single_state",
        }
    }

    pub fn allowed_in(self, mode: Mode) -> bool {
        match mode {
            Mode::Multirate => matches!(self, Method::Ideal | Method::Multirate | Method::Lcm),
            Mode::SingleState => matches!(self, Method::Ideal | Method::SingleState),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    Lorenz {
        #[serde(default = "default_sigma")]
        sigma: f64,
        #[serde(default = "default_rho")]
        rho: f64,
        #[serde(default = "default_beta")]
        beta: f64,
    },
    /// `x' = A x`, rows of `A`.
    Linear { a: Vec<Vec<f64>> },
}

fn default_sigma() -> f64 {
    0.5
}
fn default_rho() -> f64 {
    0.75
}
fn default_beta() -> f64 {
    2.0
}

impl Default for SystemSpec {
    fn default() -> Self {
        SystemSpec::Lorenz {
            sigma: default_sigma(),
            rho: default_rho(),
            beta: default_beta(),
        }
    }
}

/// Vector field built from a [`SystemSpec`].
#[derive(Debug, Clone)]
pub enum SystemField {
    Lorenz(Lorenz),
    Linear(LinearField),
}

impl VectorField for SystemField {
    fn dim(&self) -> usize {
        match self {
            SystemField::Lorenz(f) => f.dim(),
            SystemField::Linear(f) => f.dim(),
        }
    }

    fn eval(&self, x: &[f64], dx: &mut [f64]) {
        match self {
            SystemField::Lorenz(f) => f.eval(x, dx),
            SystemField::Linear(f) => f.eval(x, dx),
        }
    }
}

impl SystemSpec {
    pub fn field(&self) -> Result<SystemField> {
        match self {
            SystemSpec::Lorenz { sigma, rho, beta } => {
                if ![sigma, rho, beta].iter().all(|v| v.is_finite()) {
                    return Err(Error::Config("Lorenz parameters must be finite".into()));
                }
                Ok(SystemField::Lorenz(Lorenz::new(*sigma, *rho, *beta)))
            }
            SystemSpec::Linear { a } => {
                let n = a.len();
                if n == 0 || a.iter().any(|row| row.len() != n) {
                    return Err(Error::Config(
                        "linear system matrix must be square and nonempty".into(),
                    ));
                }
                if a.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::Config("linear system matrix must be finite".into()));
                }
                let flat: Vec<f64> = a.iter().flatten().copied().collect();
                Ok(SystemField::Linear(LinearField::new(
                    RealMatrix::from_row_slice(n, n, &flat),
                )))
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SystemSpec::Lorenz { .. } => 3,
            SystemSpec::Linear { a } => a.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RolloutSpec {
    #[default]
    Lifted,
    Relift,
}

impl From<RolloutSpec> for Rollout {
    fn from(r: RolloutSpec) -> Self {
        match r {
            RolloutSpec::Lifted => Rollout::Lifted,
            RolloutSpec::Relift => Rollout::Relift,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimationSpec {
    #[default]
    ExpLog,
    RationalPower,
}

impl From<EstimationSpec> for EstimationPath {
    fn from(e: EstimationSpec) -> Self {
        match e {
            EstimationSpec::ExpLog => EstimationPath::ExpLog,
            EstimationSpec::RationalPower => EstimationPath::RationalPower,
        }
    }
}

/// One experiment, as read from a JSON document.
///
/// Per-component depth is given either as `embedding_counts` (delay
/// observables `M_i`, so `M_i + 1` samples) or as `measurement_counts`
/// (samples per trajectory), never both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub system: SystemSpec,
    pub sample_time: f64,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding_counts: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurement_counts: Option<Vec<usize>>,
    pub trajectories: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_box: Option<Vec<[f64; 2]>>,
    pub degree: u32,
    #[serde(default = "default_true")]
    pub include_constant: bool,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_eval_count")]
    pub eval_initial_conditions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<Method>>,
    #[serde(default)]
    pub rollout: RolloutSpec,
    #[serde(default)]
    pub estimation: EstimationSpec,
    #[serde(default)]
    pub noise_std: f64,
}

fn default_true() -> bool {
    true
}
fn default_horizon() -> usize {
    50
}
fn default_eval_count() -> usize {
    10
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Multirate setup of the Lorenz study: `p = (1, 4, 3)`, depths
    /// `(12, 3, 4)`, 300 trajectories, quadratic monomials.
    pub fn lorenz_multirate(seed: u64) -> Self {
        ExperimentConfig {
            system: SystemSpec::default(),
            sample_time: 0.1,
            mode: Mode::Multirate,
            rates: Some(vec![1, 4, 3]),
            state_dim: None,
            embedding_counts: Some(vec![12, 3, 4]),
            measurement_counts: None,
            trajectories: 300,
            init_box: None,
            degree: 2,
            include_constant: true,
            horizon: default_horizon(),
            eval_initial_conditions: default_eval_count(),
            seed,
            output_dir: None,
            methods: None,
            rollout: RolloutSpec::Lifted,
            estimation: EstimationSpec::ExpLog,
            noise_std: 0.0,
        }
    }

    /// Single-state setup of the Lorenz study: three measurements per
    /// component, 100 trajectories.
    pub fn lorenz_single_state(seed: u64) -> Self {
        ExperimentConfig {
            mode: Mode::SingleState,
            rates: None,
            state_dim: Some(3),
            embedding_counts: Some(vec![2, 2, 2]),
            trajectories: 100,
            ..Self::lorenz_multirate(seed)
        }
    }

    pub fn state_dim(&self) -> usize {
        match self.mode {
            Mode::Multirate => self.rates.as_ref().map_or(0, Vec::len),
            Mode::SingleState => self.state_dim.unwrap_or_else(|| self.system.dim()),
        }
    }

    /// Delay depth `M_i` per component.
    pub fn embedding_counts(&self) -> Result<Vec<usize>> {
        let counts = match (&self.embedding_counts, &self.measurement_counts) {
            (Some(m), None) => m.clone(),
            (None, Some(samples)) => samples
                .iter()
                .map(|&s| {
                    s.checked_sub(1).filter(|&m| m >= 1).ok_or_else(|| {
                        Error::Config("measurement_counts entries must be at least 2".into())
                    })
                })
                .collect::<Result<_>>()?,
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give embedding_counts or measurement_counts, not both".into(),
                ))
            }
            (None, None) => return Err(Error::Config("embedding_counts is required".into())),
        };
        if counts.len() != self.state_dim() {
            return Err(Error::Config(format!(
                "{} per-component counts for state dimension {}",
                counts.len(),
                self.state_dim()
            )));
        }
        if counts.contains(&0) {
            return Err(Error::Config(
                "embedding_counts entries must be positive".into(),
            ));
        }
        Ok(counts)
    }

    pub fn init_box(&self) -> Vec<(f64, f64)> {
        match &self.init_box {
            Some(b) => b.iter().map(|&[lo, hi]| (lo, hi)).collect(),
            None => vec![(-1.0, 1.0); self.state_dim()],
        }
    }

    /// Methods to report, in report order.
    pub fn methods(&self) -> Vec<Method> {
        match (&self.methods, self.mode) {
            (Some(m), _) => m.clone(),
            (None, Mode::Multirate) => vec![Method::Ideal, Method::Multirate, Method::Lcm],
            (None, Mode::SingleState) => vec![Method::Ideal, Method::SingleState],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_time > 0.0 && self.sample_time.is_finite()) {
            return Err(Error::Config("sample_time must be positive".into()));
        }
        let n = self.state_dim();
        match self.mode {
            Mode::Multirate => {
                let rates = self
                    .rates
                    .as_ref()
                    .ok_or_else(|| Error::Config("multirate mode requires rates".into()))?;
                if rates.is_empty() || rates.contains(&0) {
                    return Err(Error::Config(
                        "rates must be a nonempty list of positive integers".into(),
                    ));
                }
                if self.state_dim.is_some() {
                    return Err(Error::Config(
                        "state_dim applies to single_state mode only".into(),
                    ));
                }
            }
            Mode::SingleState => {
                if self.rates.is_some() {
                    return Err(Error::Config("rates apply to multirate mode only".into()));
                }
                if n == 0 {
                    return Err(Error::Config("state_dim must be positive".into()));
                }
            }
        }
        if n != self.system.dim() {
            return Err(Error::Config(format!(
                "state dimension {n} does not match the {}-dimensional system",
                self.system.dim()
            )));
        }
        self.system.field()?;
        self.embedding_counts()?;
        if self.trajectories == 0 {
            return Err(Error::Config("trajectories must be positive".into()));
        }
        if self.horizon == 0 || self.eval_initial_conditions == 0 {
            return Err(Error::Config(
                "horizon and eval_initial_conditions must be positive".into(),
            ));
        }
        let b = self.init_box();
        if b.len() != n
            || b.iter()
                .any(|&(lo, hi)| !(lo <= hi && lo.is_finite() && hi.is_finite()))
        {
            return Err(Error::Config(format!(
                "init_box must hold {n} finite [low, high] intervals"
            )));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::Config("noise_std must be >= 0".into()));
        }
        let methods = self.methods();
        for (i, m) in methods.iter().enumerate() {
            if !m.allowed_in(self.mode) {
                return Err(Error::Config(format!(
                    "method `{m}` is not available in this mode"
                )));
            }
            if methods[..i].contains(m) {
                return Err(Error::Config(format!("method `{m}` listed twice")));
            }
        }
        Ok(())
    }

    /// Copy for the report: output location dropped so reports written to
    /// different directories stay identical.
    pub fn echo(&self) -> ExperimentConfig {
        ExperimentConfig {
            output_dir: None,
            ..self.clone()
        }
    }
}
