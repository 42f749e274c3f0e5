use hedmd_core::dynamics::TrajectoryRecord;
use hedmd_core::edmd::{
    build_edmd_matrices, fit_koopman, snapshot_count_warning, KoopmanModel, StatePairEnsemble,
    GENERATOR_REALNESS_TOL,
};
use hedmd_core::hankel::{reconstruct_states, Reconstruction};
use hedmd_core::linalg::{eigenvalues, eigenvalues_complex, spectrum_distance, Spectrum};
use hedmd_core::observables::{monomial_dictionary, Dictionary};

use super::{
    evaluate_prediction, evaluation_set, generate_ensemble, lcm_of_rates, measured_pairs,
    truth_pairs, EvaluationSet,
};
use crate::config::{ExperimentConfig, Method, Mode, SystemField};
use crate::error::{Error, Result};
use crate::report::{ComponentReport, ExperimentReport};

/// Runs the pipeline for `cfg.mode`.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    match cfg.mode {
        Mode::Multirate => run_multirate(cfg),
        Mode::SingleState => run_single_state(cfg),
    }
}

/// Shared setup. Failures after this point are recorded in the report.
struct Context {
    field: SystemField,
    dict: Dictionary,
    report: ExperimentReport,
}

fn setup(cfg: &ExperimentConfig, mode: Mode) -> Result<Context> {
    if cfg.mode != mode {
        return Err(Error::Config(format!(
            "expected mode {mode:?}, found {:?}",
            cfg.mode
        )));
    }
    cfg.validate()?;
    let field = cfg.system.field()?;
    let dict = monomial_dictionary(cfg.state_dim(), cfg.degree, cfg.include_constant)
        .map_err(|e| Error::stage("dictionary", e))?;
    let mut report = ExperimentReport::new(cfg);
    report.dictionary_size = dict.len();
    report.dictionary_manifest = dict.manifest();
    Ok(Context {
        field,
        dict,
        report,
    })
}

fn fit_pairs(
    report: &mut ExperimentReport,
    stage: &str,
    pairs: &StatePairEnsemble,
    dict: &Dictionary,
) -> Option<KoopmanModel> {
    let (px, py) = report.attempt(stage, build_edmd_matrices(pairs, dict))?;
    if let Some(w) = snapshot_count_warning(&px) {
        report.warn(stage, None, &w);
    }
    let model = report.attempt(stage, fit_koopman(dict, &px, &py, pairs.step))?;
    for w in &model.warnings {
        report.warn(stage, None, w);
    }
    Some(model)
}

fn spectrum_of(model: &KoopmanModel) -> Result<Spectrum, hedmd_core::Error> {
    let s = if model.generator_residual <= GENERATOR_REALNESS_TOL {
        eigenvalues(&model.generator)?
    } else {
        eigenvalues_complex(&model.generator_complex)?
    };
    Ok(s.sorted())
}

/// Fills the report entry of `method` from a fitted model and, when
/// evaluation data exists, from `propagator` (the model at step `T_s`).
fn fill_method(
    cfg: &ExperimentConfig,
    report: &mut ExperimentReport,
    method: Method,
    model: &KoopmanModel,
    propagator: Option<&KoopmanModel>,
    ideal: Option<&Spectrum>,
    eval: Option<&EvaluationSet>,
) {
    if report.method(method).is_none() {
        return;
    }
    let spectrum = report.attempt(&format!("spectrum:{method}"), spectrum_of(model));
    let distance = match (&spectrum, ideal) {
        (Some(s), Some(i)) => {
            report.attempt(&format!("distance:{method}"), spectrum_distance(s, i))
        }
        _ => None,
    };
    let score = match (propagator, eval) {
        (Some(p), Some(e)) => report.attempt(
            &format!("predict:{method}"),
            evaluate_prediction(p, e, cfg.rollout.into()),
        ),
        _ => None,
    };
    if let Some(s) = &score {
        if s.diverged.iter().any(Option::is_some) {
            let first = s.diverged.iter().flatten().min().copied().unwrap_or(0);
            report.warn(
                &format!("predict:{method}"),
                None,
                &hedmd_core::Warning::PredictionDiverged { step: first },
            );
        }
    }
    let residual = model.generator_residual;
    let entry = report.method_mut(method).expect("checked above");
    entry.step = Some(model.step);
    entry.spectrum = spectrum
        .map(|s| s.iter().map(|z| [z.re, z.im]).collect())
        .unwrap_or_default();
    entry.distance_to_ideal = distance;
    entry.generator_residual = Some(residual);
    entry.koopman = Some(model.koopman.clone());
    entry.generator = Some(model.generator.clone());
    if residual > GENERATOR_REALNESS_TOL {
        entry.generator_imag = Some(model.generator_complex.map(|z| z.im));
    }
    if let Some(s) = score {
        entry.rmse = s.rmse;
        entry.mean_rmse = s.mean_rmse;
        entry.diverged = s.diverged;
        entry.predicted = s.predicted;
    }
}

fn record_reconstruction(report: &mut ExperimentReport, rec: &Reconstruction) {
    for (component, w) in rec.warnings() {
        report.warn("reconstruct", Some(component), &w);
    }
    for fit in rec.fits.iter().flatten() {
        let op = &fit.operator;
        report.components.push(ComponentReport {
            component: op.component,
            dead_time: op.dead_time,
            period: op.period,
            embedding_count: op.embedding_count,
            condition: op.condition,
            generator_residual: op.generator_residual,
            estimates: fit.estimates.iter().map(|e| [e.time, e.residual]).collect(),
            koopman: op.koopman.clone(),
            generator: op.generator.clone(),
        });
    }
}

fn simulate(
    cfg: &ExperimentConfig,
    ctx: &mut Context,
) -> Option<(Vec<TrajectoryRecord>, Option<EvaluationSet>)> {
    let records = match generate_ensemble(&ctx.field, cfg, Some(2.0 * cfg.sample_time)) {
        Ok(r) => r,
        Err(e) => {
            ctx.report.record_error(&e);
            return None;
        }
    };
    let eval = match evaluation_set(&ctx.field, cfg) {
        Ok(s) => {
            ctx.report.eval_initial_conditions = s.initial.clone();
            Some(s)
        }
        Err(e) => {
            ctx.report.record_error(&e);
            None
        }
    };
    Some((records, eval))
}

fn fit_ideal(ctx: &mut Context, records: &[TrajectoryRecord], ts: f64) -> Option<KoopmanModel> {
    let pairs = ctx
        .report
        .attempt("fit:ideal", truth_pairs(records, ts, 2.0 * ts))?;
    fit_pairs(&mut ctx.report, "fit:ideal", &pairs, &ctx.dict)
}

/// Multirate EDMD against the ideal and LCM baselines.
///
/// Unmeasured components at `T_s` and `2 T_s` are reconstructed per
/// component; the LCM baseline is fitted on `(x(0), x(M T_s))` and
/// re-sampled to `T_s` for prediction.
pub fn run_multirate(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut ctx = setup(cfg, Mode::Multirate)?;
    let ts = cfg.sample_time;
    let lcm = lcm_of_rates(cfg.rates.as_deref().unwrap_or_default())?;
    let schedules = super::derive_schedules(cfg)?;
    let Some((records, eval)) = simulate(cfg, &mut ctx) else {
        return Ok(ctx.report);
    };

    let ideal = fit_ideal(&mut ctx, &records, ts);
    let ideal_spectrum = ideal.as_ref().and_then(|m| spectrum_of(m).ok());
    if let Some(m) = &ideal {
        fill_method(
            cfg,
            &mut ctx.report,
            Method::Ideal,
            m,
            Some(m),
            ideal_spectrum.as_ref(),
            eval.as_ref(),
        );
    }

    let rec = ctx.report.attempt(
        "reconstruct",
        reconstruct_states(&records, &schedules, ts, ts, cfg.estimation.into()),
    );
    if let Some(rec) = &rec {
        record_reconstruction(&mut ctx.report, rec);
        if let Some(m) = fit_pairs(&mut ctx.report, "fit:multirate", &rec.pairs, &ctx.dict) {
            fill_method(
                cfg,
                &mut ctx.report,
                Method::Multirate,
                &m,
                Some(&m),
                ideal_spectrum.as_ref(),
                eval.as_ref(),
            );
        }
    }

    let t_lcm = lcm as f64 * ts;
    if let Some(pairs) = ctx
        .report
        .attempt("fit:lcm", measured_pairs(&records, 0.0, t_lcm))
    {
        if let Some(m) = fit_pairs(&mut ctx.report, "fit:lcm", &pairs, &ctx.dict) {
            let resampled = ctx.report.attempt("resample:lcm", m.resampled(ts));
            if let Some(r) = &resampled {
                for w in &r.warnings[m.warnings.len()..] {
                    ctx.report.warn("resample:lcm", None, w);
                }
            }
            fill_method(
                cfg,
                &mut ctx.report,
                Method::Lcm,
                &m,
                resampled.as_ref(),
                ideal_spectrum.as_ref(),
                eval.as_ref(),
            );
        }
    }

    ctx.report.evaluation = eval;
    Ok(ctx.report)
}

/// Single-state EDMD against the ideal baseline.
///
/// The state is reconstructed at `n T_s` and `(n + 1) T_s`. The noise
/// floor is the spectrum distance between two ideal models fitted on
/// disjoint halves of the trajectories.
pub fn run_single_state(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut ctx = setup(cfg, Mode::SingleState)?;
    let ts = cfg.sample_time;
    let n = cfg.state_dim();
    let schedules = super::derive_schedules(cfg)?;
    let Some((records, eval)) = simulate(cfg, &mut ctx) else {
        return Ok(ctx.report);
    };

    let ideal = fit_ideal(&mut ctx, &records, ts);
    let ideal_spectrum = ideal.as_ref().and_then(|m| spectrum_of(m).ok());
    if let Some(m) = &ideal {
        fill_method(
            cfg,
            &mut ctx.report,
            Method::Ideal,
            m,
            Some(m),
            ideal_spectrum.as_ref(),
            eval.as_ref(),
        );
    }

    let rec = ctx.report.attempt(
        "reconstruct",
        reconstruct_states(
            &records,
            &schedules,
            n as f64 * ts,
            ts,
            cfg.estimation.into(),
        ),
    );
    if let Some(rec) = &rec {
        record_reconstruction(&mut ctx.report, rec);
        if let Some(m) = fit_pairs(&mut ctx.report, "fit:single_state", &rec.pairs, &ctx.dict) {
            fill_method(
                cfg,
                &mut ctx.report,
                Method::SingleState,
                &m,
                Some(&m),
                ideal_spectrum.as_ref(),
                eval.as_ref(),
            );
        }
    }

    let half = records.len() / 2;
    if half == 0 {
        ctx.report.warn(
            "noise_floor",
            None,
            &hedmd_core::Warning::Underdetermined {
                pairs: records.len(),
                observables: ctx.dict.len(),
            },
        );
    } else {
        let (a, b) = records.split_at(half);
        let fits: Vec<Option<Spectrum>> = [a, &b[..half]]
            .iter()
            .map(|part| {
                let pairs = ctx
                    .report
                    .attempt("noise_floor", truth_pairs(part, ts, 2.0 * ts))?;
                let m = fit_pairs(&mut ctx.report, "noise_floor", &pairs, &ctx.dict)?;
                ctx.report.attempt("noise_floor", spectrum_of(&m))
            })
            .collect();
        if let [Some(sa), Some(sb)] = &fits[..] {
            ctx.report.noise_floor = ctx.report.attempt("noise_floor", spectrum_distance(sa, sb));
        }
    }

    ctx.report.evaluation = eval;
    Ok(ctx.report)
}
