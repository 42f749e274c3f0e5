//! Experiment reports and their on-disk form.
//!
//! A report directory holds `summary.json`, `spectrum.csv`,
//! `prediction.csv`, `dictionary.txt` and one headerless CSV per matrix.
//! Every collection is ordered, so equal reports give equal bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use hedmd_core::linalg::{Complex64, RealMatrix};
use hedmd_core::Warning;
use serde::Serialize;

use crate::config::{ExperimentConfig, Method, Mode};
use crate::error::{Error, Result};
use crate::experiments::EvaluationSet;

pub const SCHEMA: &str = "hedmd-report/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageWarning {
    pub stage: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
}

/// Results for one model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodReport {
    pub method: Method,
    /// Sampling step of the fitted pairs.
    pub step: Option<f64>,
    /// Generator eigenvalues as `[re, im]`, sorted by real then imaginary part.
    pub spectrum: Vec<[f64; 2]>,
    pub distance_to_ideal: Option<f64>,
    /// Largest imaginary magnitude dropped from the generator.
    pub generator_residual: Option<f64>,
    pub rmse: Vec<Option<f64>>,
    pub mean_rmse: Option<f64>,
    pub diverged: Vec<Option<usize>>,
    #[serde(skip)]
    pub koopman: Option<RealMatrix>,
    #[serde(skip)]
    pub generator: Option<RealMatrix>,
    /// Imaginary part of the generator, kept when it is not negligible.
    #[serde(skip)]
    pub generator_imag: Option<RealMatrix>,
    #[serde(skip)]
    pub predicted: Vec<Vec<Vec<f64>>>,
}

impl MethodReport {
    pub fn empty(method: Method) -> Self {
        MethodReport {
            method,
            step: None,
            spectrum: Vec::new(),
            distance_to_ideal: None,
            generator_residual: None,
            rmse: Vec::new(),
            mean_rmse: None,
            diverged: Vec::new(),
            koopman: None,
            generator: None,
            generator_imag: None,
            predicted: Vec::new(),
        }
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.spectrum
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect()
    }
}

/// Per-component Hankel diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentReport {
    pub component: usize,
    pub dead_time: f64,
    pub period: f64,
    pub embedding_count: usize,
    pub condition: f64,
    pub generator_residual: f64,
    /// `[t, residual]` for every estimated instant.
    pub estimates: Vec<[f64; 2]>,
    #[serde(skip)]
    pub koopman: RealMatrix,
    #[serde(skip)]
    pub generator: RealMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub mode: Mode,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub dictionary_size: usize,
    pub methods: Vec<MethodReport>,
    pub components: Vec<ComponentReport>,
    /// Spectrum distance between ideal models fitted on disjoint halves of
    /// the trajectories.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_floor: Option<f64>,
    pub eval_initial_conditions: Vec<Vec<f64>>,
    pub warnings: Vec<StageWarning>,
    pub errors: Vec<StageError>,
    #[serde(skip)]
    pub dictionary_manifest: String,
    #[serde(skip)]
    pub evaluation: Option<EvaluationSet>,
}

impl ExperimentReport {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        ExperimentReport {
            schema: SCHEMA.into(),
            mode: cfg.mode,
            seed: cfg.seed,
            config: cfg.echo(),
            dictionary_size: 0,
            methods: cfg.methods().into_iter().map(MethodReport::empty).collect(),
            components: Vec::new(),
            noise_floor: None,
            eval_initial_conditions: Vec::new(),
            warnings: Vec::new(),
            errors: Vec::new(),
            dictionary_manifest: String::new(),
            evaluation: None,
        }
    }

    pub fn method(&self, m: Method) -> Option<&MethodReport> {
        self.methods.iter().find(|r| r.method == m)
    }

    pub fn method_mut(&mut self, m: Method) -> Option<&mut MethodReport> {
        self.methods.iter_mut().find(|r| r.method == m)
    }

    /// Adds a warning unless the same one was already recorded.
    pub fn warn(&mut self, stage: &str, component: Option<usize>, w: &Warning) {
        let entry = StageWarning {
            stage: stage.into(),
            component,
            message: w.to_string(),
        };
        if !self.warnings.contains(&entry) {
            self.warnings.push(entry);
        }
    }

    /// Records a failed stage and returns `None`.
    pub fn attempt<T>(&mut self, stage: &str, r: Result<T, hedmd_core::Error>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.errors.push(StageError {
                    stage: stage.into(),
                    message: e.to_string(),
                });
                None
            }
        }
    }

    pub fn record_error(&mut self, e: &Error) {
        let (stage, message) = match e {
            Error::Stage { stage, source } => (stage.clone(), source.to_string()),
            other => ("setup".to_string(), other.to_string()),
        };
        self.errors.push(StageError { stage, message });
    }

    /// First recorded failure as an error value.
    pub fn first_error(&self) -> Option<Error> {
        self.errors.first().map(|e| Error::Failed {
            stage: e.stage.clone(),
            message: e.message.clone(),
        })
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

pub fn matrix_csv(m: &RealMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `j * step` rounded away from representation noise.
pub(crate) fn grid_time(j: usize, step: f64) -> f64 {
    (j as f64 * step * 1e12).round() / 1e12
}

/// Writes every report file into `dir`, creating it if needed.
pub fn emit_report(report: &ExperimentReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut spectrum = String::from("method,index,real,imag\n");
    for m in &report.methods {
        for (i, [re, im]) in m.spectrum.iter().enumerate() {
            let _ = writeln!(spectrum, "{},{i},{re},{im}", m.method);
        }
    }
    write(dir, "spectrum.csv", &spectrum)?;

    let mut prediction = String::from("method,trajectory,t,component,truth,predicted\n");
    if let Some(set) = &report.evaluation {
        for m in &report.methods {
            for (traj, states) in m.predicted.iter().enumerate() {
                for (j, x) in states.iter().enumerate() {
                    let t = grid_time(j + 1, set.sample_time);
                    for (c, v) in x.iter().enumerate() {
                        let truth = set.truth[traj][j + 1][c];
                        let _ = writeln!(prediction, "{},{traj},{t},{c},{truth},{v}", m.method);
                    }
                }
            }
        }
    }
    write(dir, "prediction.csv", &prediction)?;

    let mut summary = serde_json::to_string_pretty(report).map_err(|source| Error::Json {
        path: dir.join("summary.json"),
        source,
    })?;
    summary.push('\n');
    write(dir, "summary.json", &summary)?;
    write(dir, "dictionary.txt", &report.dictionary_manifest)?;

    for m in &report.methods {
        if let Some(k) = &m.koopman {
            write(dir, &format!("koopman_{}.csv", m.method), &matrix_csv(k))?;
        }
        if let Some(l) = &m.generator {
            write(dir, &format!("generator_{}.csv", m.method), &matrix_csv(l))?;
        }
        if let Some(l) = &m.generator_imag {
            write(
                dir,
                &format!("generator_imag_{}.csv", m.method),
                &matrix_csv(l),
            )?;
        }
    }
    for c in &report.components {
        write(
            dir,
            &format!("hankel_koopman_{}.csv", c.component),
            &matrix_csv(&c.koopman),
        )?;
        write(
            dir,
            &format!("hankel_generator_{}.csv", c.component),
            &matrix_csv(&c.generator),
        )?;
    }
    Ok(())
}
