//! Vector fields, fixed-step integration and schedule-aligned sampling.

mod field;
mod rk4;
mod sampling;

pub use field::{lorenz_field, FnField, LinearField, Lorenz, VectorField};
pub use rk4::{integrate, rk4_step, DenseTrajectory};
pub use sampling::{
    common_micro_step, initial_condition, sample_ensemble, sample_trajectory, uniform_point,
    ComponentSeries, EnsembleConfig, EnsemblePlan, SamplingSchedule, TrajectoryRecord, EVAL_STREAM,
    TIME_MATCH_TOL, TRAIN_STREAM,
};
