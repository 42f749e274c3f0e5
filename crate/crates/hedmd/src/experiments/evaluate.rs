use hedmd_core::dynamics::{common_micro_step, integrate, uniform_point, VectorField, EVAL_STREAM};
use hedmd_core::edmd::{predict, KoopmanModel, Rollout};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};

/// Held-out initial conditions and their RK4 ground truth at `j T_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationSet {
    pub sample_time: f64,
    pub initial: Vec<Vec<f64>>,
    /// `truth[m][j]` is the state of trajectory `m` at `j T_s`, `j = 0..=horizon`.
    pub truth: Vec<Vec<Vec<f64>>>,
}

impl EvaluationSet {
    pub fn horizon(&self) -> usize {
        self.truth.first().map_or(0, |t| t.len().saturating_sub(1))
    }
}

/// Draws `cfg.eval_initial_conditions` points from the evaluation stream
/// and integrates each over the prediction horizon.
pub fn evaluation_set<F>(field: &F, cfg: &ExperimentConfig) -> Result<EvaluationSet>
where
    F: VectorField + Sync + ?Sized,
{
    let ts = cfg.sample_time;
    let stage = |e| Error::stage("evaluate:truth", e);
    let h = common_micro_step(ts, &[ts], ts / 10.0).map_err(stage)?;
    let per_sample = (ts / h).round() as usize;
    let bx = cfg.init_box();
    let initial: Vec<Vec<f64>> = (0..cfg.eval_initial_conditions)
        .map(|m| uniform_point(cfg.seed, EVAL_STREAM, m, &bx))
        .collect();
    let truth = initial
        .par_iter()
        .map(|x0| {
            let dense = integrate(field, x0, h, cfg.horizon * per_sample).map_err(stage)?;
            Ok((0..=cfg.horizon)
                .map(|j| dense.state(j * per_sample).to_vec())
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(EvaluationSet {
        sample_time: ts,
        initial,
        truth,
    })
}

/// Prediction errors of one model on an [`EvaluationSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionScore {
    /// Per held-out trajectory; `None` when the model diverged at the first step.
    pub rmse: Vec<Option<f64>>,
    /// Mean over trajectories with a finite RMSE.
    pub mean_rmse: Option<f64>,
    pub diverged: Vec<Option<usize>>,
    /// `predicted[m][j - 1]` is the state predicted at `j T_s`.
    pub predicted: Vec<Vec<Vec<f64>>>,
}

/// RMSE between `predict` and the ground truth at `t = j T_s`, over all
/// components and the finite prefix of each rollout.
pub fn evaluate_prediction(
    model: &KoopmanModel,
    set: &EvaluationSet,
    rollout: Rollout,
) -> Result<PredictionScore, hedmd_core::Error> {
    if (model.step - set.sample_time).abs() > 1e-12 * set.sample_time {
        return Err(hedmd_core::Error::Config(format!(
            "model step {} differs from evaluation step {}",
            model.step, set.sample_time
        )));
    }
    let horizon = set.horizon();
    let mut rmse = Vec::with_capacity(set.initial.len());
    let mut diverged = Vec::with_capacity(set.initial.len());
    let mut predicted = Vec::with_capacity(set.initial.len());
    for (x0, truth) in set.initial.iter().zip(&set.truth) {
        let p = predict(model, x0, horizon, rollout)?;
        let mut sum = 0.0;
        let mut count = 0usize;
        for (x, t) in p.states.iter().zip(&truth[1..]) {
            for (a, b) in x.iter().zip(t) {
                sum += (a - b) * (a - b);
                count += 1;
            }
        }
        rmse.push((count > 0).then(|| (sum / count as f64).sqrt()));
        diverged.push(p.diverged_at);
        predicted.push(p.states);
    }
    let finite: Vec<f64> = rmse.iter().flatten().copied().collect();
    let mean_rmse = (!finite.is_empty()).then(|| finite.iter().sum::<f64>() / finite.len() as f64);
    Ok(PredictionScore {
        rmse,
        mean_rmse,
        diverged,
        predicted,
    })
}
