//! End-to-end multirate and single-state pipelines.

mod evaluate;
mod pipeline;

use hedmd_core::dynamics::{
    sample_trajectory, EnsembleConfig, SamplingSchedule, TrajectoryRecord, VectorField,
};
use hedmd_core::edmd::StatePairEnsemble;
use hedmd_core::linalg::RealMatrix;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Mode};
use crate::error::{Error, Result};

pub use evaluate::{evaluate_prediction, evaluation_set, EvaluationSet, PredictionScore};
pub use pipeline::{run, run_multirate, run_single_state};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Least common multiple of the sampling-rate multipliers.
pub fn lcm_of_rates(rates: &[u32]) -> Result<u64> {
    if rates.is_empty() || rates.contains(&0) {
        return Err(Error::Config(
            "rates must be a nonempty list of positive integers".into(),
        ));
    }
    rates.iter().try_fold(1u64, |acc, &p| {
        let p = u64::from(p);
        (acc / gcd(acc, p))
            .checked_mul(p)
            .ok_or_else(|| Error::Config("least common multiple of rates overflows".into()))
    })
}

/// Sampling schedules implied by the mode.
///
/// Multirate: `r_i = 0`, `T_i = p_i T_s`. Single-state: component `i`
/// (0-based) has `r_i = (i + 1) T_s` and `T_i = n T_s`.
pub fn derive_schedules(cfg: &ExperimentConfig) -> Result<Vec<SamplingSchedule>> {
    let counts = cfg.embedding_counts()?;
    let ts = cfg.sample_time;
    let n = cfg.state_dim();
    let stage = |e| Error::stage("schedule", e);
    match cfg.mode {
        Mode::Multirate => {
            let rates = cfg
                .rates
                .as_ref()
                .ok_or_else(|| Error::Config("multirate mode requires rates".into()))?;
            rates
                .iter()
                .zip(&counts)
                .enumerate()
                .map(|(i, (&p, &m))| {
                    SamplingSchedule::new(i, 0.0, f64::from(p) * ts, m).map_err(stage)
                })
                .collect()
        }
        Mode::SingleState => counts
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                SamplingSchedule::new(i, (i + 1) as f64 * ts, n as f64 * ts, m).map_err(stage)
            })
            .collect(),
    }
}

/// Training ensemble for `cfg`, with dense truth kept through `truth_until`.
///
/// Trajectories are simulated in parallel; each draws from its own seed
/// substream and results are kept in index order.
pub fn generate_ensemble<F>(
    field: &F,
    cfg: &ExperimentConfig,
    truth_until: Option<f64>,
) -> Result<Vec<TrajectoryRecord>>
where
    F: VectorField + Sync + ?Sized,
{
    let mut ens = EnsembleConfig::new(
        derive_schedules(cfg)?,
        cfg.trajectories,
        cfg.init_box(),
        cfg.seed,
        cfg.sample_time,
    );
    ens.truth_until = truth_until;
    ens.noise_std = cfg.noise_std;
    let plan = ens.plan().map_err(|e| Error::stage("simulate", e))?;
    (0..cfg.trajectories)
        .into_par_iter()
        .map(|k| {
            sample_trajectory(field, &plan, k)
                .map_err(|e| Error::stage(format!("simulate:trajectory {k}"), e))
        })
        .collect()
}

/// Pairs `(x(t0), x(t1))` taken from the dense ground truth.
pub fn truth_pairs(
    records: &[TrajectoryRecord],
    t0: f64,
    t1: f64,
) -> Result<StatePairEnsemble, hedmd_core::Error> {
    gather_pairs(records, t0, t1, |r, t| r.truth_at(t).map(<[f64]>::to_vec))
}

/// Pairs `(x(t0), x(t1))` where every component is measured at both times.
pub fn measured_pairs(
    records: &[TrajectoryRecord],
    t0: f64,
    t1: f64,
) -> Result<StatePairEnsemble, hedmd_core::Error> {
    gather_pairs(records, t0, t1, |r, t| {
        (0..r.initial.len())
            .map(|i| r.component(i).and_then(|s| s.value_at(t)))
            .collect()
    })
}

fn gather_pairs(
    records: &[TrajectoryRecord],
    t0: f64,
    t1: f64,
    state: impl Fn(&TrajectoryRecord, f64) -> Option<Vec<f64>>,
) -> Result<StatePairEnsemble, hedmd_core::Error> {
    let n = records.first().map_or(0, |r| r.initial.len());
    let mut current = RealMatrix::zeros(n, records.len());
    let mut next = RealMatrix::zeros(n, records.len());
    for (k, r) in records.iter().enumerate() {
        for (t, out) in [(t0, &mut current), (t1, &mut next)] {
            let x = state(r, t).ok_or_else(|| hedmd_core::Error::Data {
                trajectory: k,
                component: 0,
                reason: format!("full state not available at t = {t}"),
            })?;
            out.column_mut(k).copy_from_slice(&x);
        }
    }
    StatePairEnsemble::measured(current, next, t1 - t0)
}
