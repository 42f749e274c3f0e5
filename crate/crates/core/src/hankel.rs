//! Per-component Hankel DMD.
//!
//! For component `i` measured at `r_i + l T_i`, `l = 0..=M_i`, the delay
//! vectors `[x_i(r_i), ..., x_i(r_i + (M_i-1) T_i)]` of all trajectories
//! form `P_x`, and the same vectors shifted by one period form `P_y`. The
//! fitted `K_i = P_y P_x^+` and its generator `L_i = log(K_i) / T_i`
//! propagate the delay vector to any time, and the first row of the
//! propagated data gives the component estimate.

use alloc::format;
use alloc::vec::Vec;

use crate::dynamics::{ComponentSeries, SamplingSchedule, TrajectoryRecord, TIME_MATCH_TOL};
use crate::edmd::{
    most_negative_real, Source, StatePairEnsemble, GENERATOR_REALNESS_TOL, PROPAGATOR_REALNESS_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{
    cast_real, condition_number, fractional_power, matrix_exp, matrix_log, pinv, Complex64,
    ComplexMatrix, RealMatrix,
};
use crate::warning::Warning;

/// Condition number of `P_x` above which a warning is recorded.
pub const CONDITION_GUARD: f64 = 1e12;
/// Estimation times beyond this multiple of the sampled window are flagged.
pub const EXTRAPOLATION_GUARD: f64 = 2.0;

/// Delay-embedded data matrices of one component (`M_i x K` each).
#[derive(Debug, Clone, PartialEq)]
pub struct HankelDataMatrices {
    pub schedule: SamplingSchedule,
    pub px: RealMatrix,
    pub py: RealMatrix,
}

pub fn build_hankel_matrices(
    series: &[&ComponentSeries],
    schedule: &SamplingSchedule,
) -> Result<HankelDataMatrices> {
    let m = schedule.embedding_count;
    let i = schedule.component;
    let mut px = RealMatrix::zeros(m, series.len());
    let mut py = RealMatrix::zeros(m, series.len());
    for (k, s) in series.iter().enumerate() {
        let data_err = |reason| Error::Data {
            trajectory: k,
            component: i,
            reason,
        };
        if s.component != i {
            return Err(data_err(format!("series is for component {}", s.component)));
        }
        if s.samples.len() < m + 1 {
            return Err(data_err(format!(
                "{} samples, need {}",
                s.samples.len(),
                m + 1
            )));
        }
        for (l, &(t, _)) in s.samples.iter().take(m + 1).enumerate() {
            if (t - schedule.time(l)).abs() > TIME_MATCH_TOL {
                return Err(data_err(format!(
                    "sample {l} at t={t}, schedule expects {}",
                    schedule.time(l)
                )));
            }
        }
        for l in 0..m {
            px[(l, k)] = s.samples[l].1;
            py[(l, k)] = s.samples[l + 1].1;
        }
    }
    Ok(HankelDataMatrices {
        schedule: *schedule,
        px,
        py,
    })
}

/// Fitted delay-space operator of one component.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentOperator {
    pub component: usize,
    /// `K_i`, one sampling period.
    pub koopman: RealMatrix,
    /// Real part of `L_i`.
    pub generator: RealMatrix,
    pub generator_complex: ComplexMatrix,
    pub generator_residual: f64,
    pub period: f64,
    pub dead_time: f64,
    pub embedding_count: usize,
    pub condition: f64,
    pub warnings: Vec<Warning>,
}

pub fn fit_component_operator(h: &HankelDataMatrices) -> Result<ComponentOperator> {
    let s = &h.schedule;
    let component = s.component;
    let mut warnings = Vec::new();
    if h.px.ncols() < h.px.nrows() {
        warnings.push(Warning::Underdetermined {
            pairs: h.px.ncols(),
            observables: h.px.nrows(),
        });
    }
    let condition = condition_number(&h.px).map_err(|e| e.in_component(component))?;
    if condition > CONDITION_GUARD {
        warnings.push(Warning::IllConditioned { condition });
    }
    let koopman = &h.py * pinv(&h.px, None).map_err(|e| e.in_component(component))?;
    let log = matrix_log(&koopman).map_err(|e| e.in_component(component))?;
    if log.negative_real_axis {
        warnings.push(Warning::NegativeRealEigenvalue {
            eigenvalue_re: most_negative_real(&koopman),
        });
    }
    let generator_complex = log.value / Complex64::new(s.period, 0.0);
    let cast = cast_real(&generator_complex);
    if cast.max_imag > GENERATOR_REALNESS_TOL {
        warnings.push(Warning::ImaginaryResidual {
            residual: cast.max_imag,
        });
    }
    Ok(ComponentOperator {
        component,
        koopman,
        generator: cast.value,
        generator_complex,
        generator_residual: cast.max_imag,
        period: s.period,
        dead_time: s.dead_time,
        embedding_count: s.embedding_count,
        condition,
        warnings,
    })
}

/// Estimates of one component at one time, one value per trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentEstimate {
    pub time: f64,
    pub values: Vec<f64>,
    /// Largest imaginary magnitude discarded from the estimates.
    pub residual: f64,
    pub warnings: Vec<Warning>,
}

fn time_warnings(op: &ComponentOperator, t: f64) -> Vec<Warning> {
    let mut w = Vec::new();
    let tau = t - op.dead_time;
    if tau < -TIME_MATCH_TOL {
        w.push(Warning::BeforeFirstSample {
            time: t,
            dead_time: op.dead_time,
        });
    }
    let ratio = tau / (op.embedding_count as f64 * op.period);
    if ratio > EXTRAPOLATION_GUARD {
        w.push(Warning::Extrapolation { ratio });
    }
    w
}

/// `e_1^T P P_x` for a complex propagator `P`.
fn first_row_times(
    prop: &ComplexMatrix,
    px: &RealMatrix,
    t: f64,
    mut warnings: Vec<Warning>,
) -> Result<ComponentEstimate> {
    let mut residual = 0.0f64;
    let mut values = Vec::with_capacity(px.ncols());
    for k in 0..px.ncols() {
        let mut acc = Complex64::new(0.0, 0.0);
        for l in 0..px.nrows() {
            acc += prop[(0, l)] * px[(l, k)];
        }
        if !(acc.re.is_finite() && acc.im.is_finite()) {
            return Err(Error::NonFinite("component estimate"));
        }
        residual = residual.max(acc.im.abs());
        values.push(acc.re);
    }
    if residual > PROPAGATOR_REALNESS_TOL {
        warnings.push(Warning::ImaginaryResidual { residual });
    }
    Ok(ComponentEstimate {
        time: t,
        values,
        residual,
        warnings,
    })
}

/// Component values at time `t` via `e_1^T exp(L_i (t - r_i)) P_x`.
pub fn estimate_component_at(
    op: &ComponentOperator,
    h: &HankelDataMatrices,
    t: f64,
) -> Result<ComponentEstimate> {
    let tau = t - op.dead_time;
    let prop = matrix_exp(&(&op.generator_complex * Complex64::new(tau, 0.0)))
        .map_err(|e| e.in_component(op.component))?;
    first_row_times(&prop, &h.px, t, time_warnings(op, t))
}

/// Component values at time `t` via the fractional power
/// `K_i^((t - r_i)/T_i)` from the eigendecomposition of `K_i`.
pub fn rational_power_estimate(
    op: &ComponentOperator,
    h: &HankelDataMatrices,
    t: f64,
) -> Result<ComponentEstimate> {
    let p = (t - op.dead_time) / op.period;
    let prop = fractional_power(&op.koopman, p).map_err(|e| e.in_component(op.component))?;
    first_row_times(&prop, &h.px, t, time_warnings(op, t))
}

/// How unmeasured component values are propagated to target times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EstimationPath {
    /// `exp(L_i t)` from the principal logarithm.
    #[default]
    ExpLog,
    /// Eigendecomposition-based fractional power of `K_i`.
    RationalPower,
}

/// Fitted operator of a component that needed estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentFit {
    pub data: HankelDataMatrices,
    pub operator: ComponentOperator,
    pub estimates: Vec<ComponentEstimate>,
}

/// Full-state pairs at two target times plus the per-component fits used.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub pairs: StatePairEnsemble,
    /// Indexed by component; `None` when every target was measured.
    pub fits: Vec<Option<ComponentFit>>,
}

impl Reconstruction {
    /// All warnings tagged with their component.
    pub fn warnings(&self) -> Vec<(usize, Warning)> {
        let mut out = Vec::new();
        for fit in self.fits.iter().flatten() {
            let i = fit.operator.component;
            out.extend(fit.operator.warnings.iter().cloned().map(|w| (i, w)));
            for e in &fit.estimates {
                out.extend(e.warnings.iter().cloned().map(|w| (i, w)));
            }
        }
        out
    }
}

/// Reconstructs `x(t0)` and `x(t0 + step)` on every trajectory.
///
/// A component measured at a target time keeps its measured value;
/// otherwise its Hankel operator is fitted jointly over all trajectories
/// and propagated to the target.
pub fn reconstruct_states(
    records: &[TrajectoryRecord],
    schedules: &[SamplingSchedule],
    first_target: f64,
    step: f64,
    path: EstimationPath,
) -> Result<Reconstruction> {
    if records.is_empty() {
        return Err(Error::Config("no trajectories to reconstruct".into()));
    }
    if !(step > 0.0) {
        return Err(Error::Config("reconstruction step must be positive".into()));
    }
    let n = records[0].initial.len();
    let k_count = records.len();
    let targets = [first_target, first_target + step];
    let mut states = [RealMatrix::zeros(n, k_count), RealMatrix::zeros(n, k_count)];
    let mut provenance = Vec::with_capacity(n);
    let mut fits = Vec::with_capacity(n);

    for i in 0..n {
        let mut matching = schedules.iter().filter(|s| s.component == i);
        let schedule = match (matching.next(), matching.next()) {
            (Some(s), None) => s,
            (None, _) => {
                return Err(Error::Config(format!(
                    "no sampling schedule for component {i}"
                )))
            }
            (Some(_), Some(_)) => {
                return Err(Error::Config(format!(
                    "component {i} has more than one schedule"
                )))
            }
        };
        let series: Vec<&ComponentSeries> = records
            .iter()
            .enumerate()
            .map(|(k, r)| {
                r.component(i).ok_or_else(|| Error::Data {
                    trajectory: k,
                    component: i,
                    reason: "component missing from record".into(),
                })
            })
            .collect::<Result<_>>()?;

        let measured: Vec<Vec<Option<f64>>> = targets
            .iter()
            .map(|&t| series.iter().map(|s| s.value_at(t)).collect())
            .collect();
        let needs_fit = measured.iter().flatten().any(Option::is_none);

        let mut fit = if needs_fit {
            let data = build_hankel_matrices(&series, schedule)?;
            let operator = fit_component_operator(&data)?;
            Some(ComponentFit {
                data,
                operator,
                estimates: Vec::new(),
            })
        } else {
            None
        };

        let mut sources = [Source::Measured; 2];
        for (j, &t) in targets.iter().enumerate() {
            let estimate = if measured[j].iter().any(Option::is_none) {
                sources[j] = Source::Estimated;
                let f = fit
                    .as_mut()
                    .expect("fit exists when a target is unmeasured");
                let e = match path {
                    EstimationPath::ExpLog => estimate_component_at(&f.operator, &f.data, t)?,
                    EstimationPath::RationalPower => {
                        rational_power_estimate(&f.operator, &f.data, t)?
                    }
                };
                f.estimates.push(e.clone());
                Some(e)
            } else {
                None
            };
            for k in 0..k_count {
                states[j][(i, k)] = match measured[j][k] {
                    Some(v) => v,
                    None => estimate.as_ref().map(|e| e.values[k]).unwrap_or(f64::NAN),
                };
            }
        }
        provenance.push((sources[0], sources[1]));
        fits.push(fit);
    }

    let [current, next] = states;
    Ok(Reconstruction {
        pairs: StatePairEnsemble {
            current,
            next,
            step,
            provenance,
        },
        fits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{sample_ensemble, EnsembleConfig, LinearField};
    use alloc::vec;
    #[allow(unused_imports)] // method calls resolve to std when it is linked
    use num_traits::Float;

    fn geometric_series(
        x0: &[f64],
        rho: f64,
        period: f64,
        m: usize,
    ) -> (Vec<ComponentSeries>, SamplingSchedule) {
        let sched = SamplingSchedule::new(0, 0.0, period, m).unwrap();
        let series = x0
            .iter()
            .map(|&a| ComponentSeries {
                component: 0,
                samples: (0..=m)
                    .map(|l| (sched.time(l), a * rho.powi(l as i32)))
                    .collect(),
            })
            .collect();
        (series, sched)
    }

    #[test]
    fn smallest_case() {
        let sched = SamplingSchedule::new(0, 0.0, 0.1, 1).unwrap();
        let s = |a: f64, b: f64| ComponentSeries {
            component: 0,
            samples: vec![(0.0, a), (0.1, b)],
        };
        let (a, b) = (s(1.0, 2.0), s(3.0, 4.0));
        let h = build_hankel_matrices(&[&a, &b], &sched).unwrap();
        assert_eq!(h.px, RealMatrix::from_row_slice(1, 2, &[1.0, 3.0]));
        assert_eq!(h.py, RealMatrix::from_row_slice(1, 2, &[2.0, 4.0]));
    }

    #[test]
    fn shift_structure() {
        let (series, sched) = geometric_series(&[1.0, -0.5, 2.0], 0.8, 0.1, 4);
        let refs: Vec<&ComponentSeries> = series.iter().collect();
        let h = build_hankel_matrices(&refs, &sched).unwrap();
        for l in 0..3 {
            assert_eq!(h.py.row(l), h.px.row(l + 1));
        }
    }

    #[test]
    fn insufficient_samples_name_the_trajectory() {
        let (mut series, sched) = geometric_series(&[1.0, 2.0], 0.9, 0.1, 3);
        series[1].samples.pop();
        let refs: Vec<&ComponentSeries> = series.iter().collect();
        match build_hankel_matrices(&refs, &sched) {
            Err(Error::Data {
                trajectory,
                component,
                ..
            }) => assert_eq!((trajectory, component), (1, 0)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn geometric_scalar_fit_and_estimates() {
        let (rho, period) = (0.9, 0.1);
        let x0 = [1.0, -0.7, 0.3, 2.0];
        let (series, sched) = geometric_series(&x0, rho, period, 1);
        let refs: Vec<&ComponentSeries> = series.iter().collect();
        let h = build_hankel_matrices(&refs, &sched).unwrap();
        let op = fit_component_operator(&h).unwrap();
        assert!((op.koopman[(0, 0)] - rho).abs() < 1e-15);
        assert!((op.generator[(0, 0)] - rho.ln() / period).abs() < 1e-12);

        let at0 = estimate_component_at(&op, &h, 0.0).unwrap();
        assert_eq!(at0.values, x0.to_vec());
        let one = estimate_component_at(&op, &h, period).unwrap();
        for (v, want) in one.values.iter().zip(h.py.row(0).iter()) {
            assert!((v - want).abs() < 1e-10);
        }
        let half = estimate_component_at(&op, &h, 0.05).unwrap();
        for (v, a) in half.values.iter().zip(&x0) {
            assert!((v - a * rho.powf(0.5)).abs() < 1e-12);
        }
        assert!(half.warnings.is_empty());
    }

    #[test]
    fn constant_signals_are_fixed_points() {
        let (series, sched) = geometric_series(&[1.0, 2.0, -3.0], 1.0, 0.2, 1);
        let refs: Vec<&ComponentSeries> = series.iter().collect();
        let op = fit_component_operator(&build_hankel_matrices(&refs, &sched).unwrap()).unwrap();
        assert!((op.koopman[(0, 0)] - 1.0).abs() < 1e-15);
        assert!(op.generator[(0, 0)].abs() < 1e-14);
    }

    #[test]
    fn delay_embedding_of_oscillator_recovers_frequency_pair() {
        let (w, period) = (2.0, 0.1);
        let a = RealMatrix::from_row_slice(2, 2, &[0.0, -w, w, 0.0]);
        let sched = SamplingSchedule::new(0, 0.0, period, 2).unwrap();
        let cfg = EnsembleConfig::new(vec![sched], 12, vec![(-1.0, 1.0); 2], 5, period);
        let recs = sample_ensemble(&LinearField::new(a), &cfg).unwrap();
        let refs: Vec<&ComponentSeries> = recs.iter().map(|r| r.component(0).unwrap()).collect();
        let op = fit_component_operator(&build_hankel_matrices(&refs, &sched).unwrap()).unwrap();
        let spec = crate::linalg::eigenvalues(&op.koopman).unwrap();
        let want = crate::linalg::Spectrum::new(vec![
            Complex64::new((w * period).cos(), (w * period).sin()),
            Complex64::new((w * period).cos(), -(w * period).sin()),
        ]);
        assert!(crate::linalg::spectrum_distance(&spec, &want).unwrap() < 1e-8);
    }

    #[test]
    fn rational_power_paths() {
        let (rho, period) = (0.9, 0.1);
        let x0 = [1.0, -0.7, 0.3];
        let (series, sched) = geometric_series(&x0, rho, period, 1);
        let refs: Vec<&ComponentSeries> = series.iter().collect();
        let h = build_hankel_matrices(&refs, &sched).unwrap();
        let op = fit_component_operator(&h).unwrap();
        let two = rational_power_estimate(&op, &h, 2.0 * period).unwrap();
        for (v, a) in two.values.iter().zip(&x0) {
            assert!((v - a * rho * rho).abs() < 1e-10);
        }
        let frac = rational_power_estimate(&op, &h, 0.037).unwrap();
        let explog = estimate_component_at(&op, &h, 0.037).unwrap();
        assert!(frac.residual < 1e-12);
        for (a, b) in frac.values.iter().zip(&explog.values) {
            assert!((a - b).abs() < 1e-8);
        }

        // alternating signal: K = [-0.5] has no real half power
        let (series, sched) = geometric_series(&x0, -0.5, period, 1);
        let refs: Vec<&ComponentSeries> = series.iter().collect();
        let h = build_hankel_matrices(&refs, &sched).unwrap();
        let op = fit_component_operator(&h).unwrap();
        assert!(op
            .warnings
            .iter()
            .any(|w| matches!(w, Warning::NegativeRealEigenvalue { .. })));
        let half = rational_power_estimate(&op, &h, 0.5 * period).unwrap();
        assert!(half.residual > 0.1);
        assert!(half
            .warnings
            .iter()
            .any(|w| matches!(w, Warning::ImaginaryResidual { .. })));
    }

    #[test]
    fn time_guards() {
        let (series, sched) = geometric_series(&[1.0, 2.0], 0.9, 0.1, 1);
        let refs: Vec<&ComponentSeries> = series.iter().collect();
        let h = build_hankel_matrices(&refs, &sched).unwrap();
        let op = fit_component_operator(&h).unwrap();
        let far = estimate_component_at(&op, &h, 0.5).unwrap();
        assert!(far
            .warnings
            .iter()
            .any(|w| matches!(w, Warning::Extrapolation { .. })));
        let mut shifted = op.clone();
        shifted.dead_time = 0.2;
        let early = estimate_component_at(&shifted, &h, 0.1).unwrap();
        assert!(early
            .warnings
            .iter()
            .any(|w| matches!(w, Warning::BeforeFirstSample { .. })));
    }
}
