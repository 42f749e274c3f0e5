//! Per-component sampling schedules and seeded ensemble generation.
//!
//! Every schedule instant must land on the integration grid, so sampled
//! values are taken verbatim from the RK4 trajectory with no
//! interpolation. Each trajectory draws its initial condition from its
//! own ChaCha stream keyed by `(seed, domain, index)`, which keeps
//! ensembles identical however the trajectories are scheduled.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // method calls resolve to std when it is linked
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{integrate, DenseTrajectory, VectorField};
use crate::error::{Error, Result};

/// Two instants closer than this are the same measurement time.
pub const TIME_MATCH_TOL: f64 = 1e-9;

/// Stream domain for training initial conditions.
pub const TRAIN_STREAM: u64 = 0;
/// Stream domain for held-out evaluation initial conditions.
pub const EVAL_STREAM: u64 = 1;

const GRID_TOL: f64 = 1e-12;
const MAX_GRID_DIVISOR: usize = 1000;

/// Component `i` is measured at `dead_time + l * period` for
/// `l = 0..=embedding_count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingSchedule {
    pub component: usize,
    pub dead_time: f64,
    pub period: f64,
    pub embedding_count: usize,
}

impl SamplingSchedule {
    pub fn new(
        component: usize,
        dead_time: f64,
        period: f64,
        embedding_count: usize,
    ) -> Result<Self> {
        if !(dead_time >= 0.0 && dead_time.is_finite()) {
            return Err(Error::Config(format!(
                "component {component}: dead time must be >= 0"
            )));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::Config(format!(
                "component {component}: period must be > 0"
            )));
        }
        if embedding_count < 1 {
            return Err(Error::Config(format!(
                "component {component}: embedding count must be >= 1"
            )));
        }
        Ok(SamplingSchedule {
            component,
            dead_time,
            period,
            embedding_count,
        })
    }

    pub fn sample_count(&self) -> usize {
        self.embedding_count + 1
    }

    pub fn time(&self, l: usize) -> f64 {
        self.dead_time + l as f64 * self.period
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.sample_count()).map(move |l| self.time(l))
    }

    pub fn last_time(&self) -> f64 {
        self.time(self.embedding_count)
    }
}

/// Timestamped measurements of one component along one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSeries {
    pub component: usize,
    pub samples: Vec<(f64, f64)>,
}

impl ComponentSeries {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.1)
    }

    /// Measured value at `t`, if any sample lies within [`TIME_MATCH_TOL`].
    pub fn value_at(&self, t: f64) -> Option<f64> {
        self.samples
            .iter()
            .find(|(time, _)| (time - t).abs() <= TIME_MATCH_TOL)
            .map(|s| s.1)
    }
}

/// One simulated trajectory: its initial condition, the per-component
/// measurements and optionally the dense ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub id: usize,
    pub initial: Vec<f64>,
    pub series: Vec<ComponentSeries>,
    pub truth: Option<DenseTrajectory>,
}

impl TrajectoryRecord {
    pub fn component(&self, i: usize) -> Option<&ComponentSeries> {
        self.series.iter().find(|s| s.component == i)
    }

    /// Dense ground-truth state at `t`, when `t` is on the truth grid.
    pub fn truth_at(&self, t: f64) -> Option<&[f64]> {
        let truth = self.truth.as_ref()?;
        let j = (t / truth.step).round();
        if j < 0.0 || (j * truth.step - t).abs() > TIME_MATCH_TOL || j as usize >= truth.len() {
            return None;
        }
        Some(truth.state(j as usize))
    }
}

fn on_grid(v: f64, h: f64) -> bool {
    let k = (v / h).round();
    (v - k * h).abs() <= GRID_TOL * v.abs().max(1.0)
}

/// Largest step of the form `base / q` (`q <= 1000`) dividing every
/// entry of `times`, then refined by an integer factor until it is at most
/// `max_step`.
pub fn common_micro_step(base: f64, times: &[f64], max_step: f64) -> Result<f64> {
    if !(base > 0.0 && base.is_finite()) {
        return Err(Error::Config("base period must be positive".into()));
    }
    let h = (1..=MAX_GRID_DIVISOR)
        .map(|q| base / q as f64)
        .find(|&h| times.iter().all(|&t| on_grid(t, h)))
        .ok_or_else(|| {
            Error::Config(format!(
                "no common integration step of the form base/q (q <= {MAX_GRID_DIVISOR}) aligns all sample times"
            ))
        })?;
    if h <= max_step {
        return Ok(h);
    }
    let refine = (h / max_step).ceil();
    Ok(h / refine)
}

/// Inputs for [`sample_ensemble`].
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub schedules: Vec<SamplingSchedule>,
    pub trajectories: usize,
    /// Per-axis `(low, high)` interval for initial conditions.
    pub init_box: Vec<(f64, f64)>,
    pub seed: u64,
    /// Base period; sets the rational grid and caps the step at a tenth of it.
    pub base_period: f64,
    /// Keep the dense ground truth on `[0, truth_until]`.
    pub truth_until: Option<f64>,
    /// Standard deviation of additive Gaussian measurement noise.
    pub noise_std: f64,
}

impl EnsembleConfig {
    pub fn new(
        schedules: Vec<SamplingSchedule>,
        trajectories: usize,
        init_box: Vec<(f64, f64)>,
        seed: u64,
        base_period: f64,
    ) -> Self {
        EnsembleConfig {
            schedules,
            trajectories,
            init_box,
            seed,
            base_period,
            truth_until: None,
            noise_std: 0.0,
        }
    }

    /// Resolves the integration step and horizon.
    pub fn plan(&self) -> Result<EnsemblePlan> {
        if self.trajectories == 0 {
            return Err(Error::Config("at least one trajectory is required".into()));
        }
        if !(self.noise_std >= 0.0) {
            return Err(Error::Config(
                "noise standard deviation must be >= 0".into(),
            ));
        }
        for (axis, &(lo, hi)) in self.init_box.iter().enumerate() {
            if !(lo <= hi && lo.is_finite() && hi.is_finite()) {
                return Err(Error::Config(format!(
                    "init box axis {axis} is not a finite interval"
                )));
            }
        }
        let mut times: Vec<f64> = Vec::new();
        for s in &self.schedules {
            times.push(s.dead_time);
            times.push(s.period);
        }
        let horizon = self
            .schedules
            .iter()
            .map(|s| s.last_time())
            .chain(self.truth_until)
            .fold(0.0, f64::max);
        if let Some(t) = self.truth_until {
            times.push(t);
        }
        let step = common_micro_step(self.base_period, &times, self.base_period / 10.0)?;
        let n_steps = (horizon / step).round() as usize;
        Ok(EnsemblePlan {
            config: self.clone(),
            step,
            n_steps,
        })
    }
}

/// A validated [`EnsembleConfig`] with its integration grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsemblePlan {
    pub config: EnsembleConfig,
    pub step: f64,
    pub n_steps: usize,
}

fn stream(seed: u64, domain: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((domain << 48) ^ index as u64);
    rng
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; 1 - u keeps the log argument in (0, 1]
    let u1 = 1.0 - unit_f64(rng);
    let u2 = unit_f64(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos()
}

/// Point drawn uniformly from `init_box` on the `(seed, domain, index)`
/// stream.
pub fn uniform_point(seed: u64, domain: u64, index: usize, init_box: &[(f64, f64)]) -> Vec<f64> {
    let mut rng = stream(seed, domain, index);
    init_box
        .iter()
        .map(|&(lo, hi)| lo + (hi - lo) * unit_f64(&mut rng))
        .collect()
}

/// Initial condition of training trajectory `k`.
pub fn initial_condition(seed: u64, k: usize, init_box: &[(f64, f64)]) -> Vec<f64> {
    uniform_point(seed, TRAIN_STREAM, k, init_box)
}

/// Simulates trajectory `k` of the plan and samples it on each schedule.
pub fn sample_trajectory<F: VectorField + ?Sized>(
    field: &F,
    plan: &EnsemblePlan,
    k: usize,
) -> Result<TrajectoryRecord> {
    let cfg = &plan.config;
    let n = field.dim();
    if cfg.init_box.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: cfg.init_box.len(),
        });
    }
    for s in &cfg.schedules {
        if s.component >= n {
            return Err(Error::Config(format!(
                "schedule for component {} but state dimension is {n}",
                s.component
            )));
        }
    }
    let mut rng = stream(cfg.seed, TRAIN_STREAM, k);
    let initial: Vec<f64> = cfg
        .init_box
        .iter()
        .map(|&(lo, hi)| lo + (hi - lo) * unit_f64(&mut rng))
        .collect();
    let dense = integrate(field, &initial, plan.step, plan.n_steps)?;

    let series = cfg
        .schedules
        .iter()
        .map(|s| {
            let samples = s
                .times()
                .map(|t| {
                    let j = (t / plan.step).round() as usize;
                    let mut v = dense.state(j)[s.component];
                    if cfg.noise_std > 0.0 {
                        v += cfg.noise_std * standard_normal(&mut rng);
                    }
                    (t, v)
                })
                .collect();
            ComponentSeries {
                component: s.component,
                samples,
            }
        })
        .collect();

    let truth = cfg.truth_until.map(|_| dense);
    Ok(TrajectoryRecord {
        id: k,
        initial,
        series,
        truth,
    })
}

/// Sequentially simulates all trajectories of `config`.
pub fn sample_ensemble<F: VectorField + ?Sized>(
    field: &F,
    config: &EnsembleConfig,
) -> Result<Vec<TrajectoryRecord>> {
    let plan = config.plan()?;
    (0..config.trajectories)
        .map(|k| sample_trajectory(field, &plan, k))
        .collect()
}
