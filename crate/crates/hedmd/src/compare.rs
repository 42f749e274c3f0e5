//! Seed sweeps.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::experiments::run;
use crate::report::ExperimentReport;

/// Runs `cfg` once per seed; reports come back in seed order.
pub fn sweep(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<Vec<ExperimentReport>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let mut c = cfg.clone();
            c.seed = seed;
            run(&c)
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per seed and method.
pub fn compare_csv(reports: &[ExperimentReport]) -> String {
    let mut out = String::from("seed,method,distance_to_ideal,mean_rmse,noise_floor\n");
    for r in reports {
        for m in &r.methods {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.seed,
                m.method,
                opt(m.distance_to_ideal),
                opt(m.mean_rmse),
                opt(r.noise_floor)
            );
        }
    }
    out
}

pub fn emit_compare(reports: &[ExperimentReport], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("compare.csv");
    fs::write(&path, compare_csv(reports)).map_err(|e| Error::io(path, e))
}
