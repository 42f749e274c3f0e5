//! Ensemble export and import: one CSV per trajectory with columns
//! `component,time,value`, named `trajectory_<index>.csv`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use hedmd_core::dynamics::{ComponentSeries, TrajectoryRecord};

use crate::error::{Error, Result};

pub const HEADER: &str = "component,time,value";

fn file_name(id: usize) -> String {
    format!("trajectory_{id:05}.csv")
}

pub fn write_ensemble(dir: &Path, records: &[TrajectoryRecord]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for r in records {
        let mut out = String::from(HEADER);
        out.push('\n');
        for s in &r.series {
            for (t, v) in &s.samples {
                let _ = writeln!(out, "{},{t},{v}", s.component);
            }
        }
        let path = dir.join(file_name(r.id));
        fs::write(&path, out).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// Reads every `trajectory_*.csv` in `dir`, ordered by index.
///
/// The files carry no initial condition; it is taken from samples at
/// `t = 0` where present and left as NaN otherwise. Dense truth is not
/// restored.
pub fn read_ensemble(dir: &Path, dim: usize) -> Result<Vec<TrajectoryRecord>> {
    let mut entries: Vec<(usize, std::path::PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default();
        if let Some(id) = name
            .strip_prefix("trajectory_")
            .and_then(|s| s.strip_suffix(".csv"))
            .and_then(|s| s.parse().ok())
        {
            entries.push((id, path));
        }
    }
    entries.sort();
    entries
        .iter()
        .map(|(id, path)| read_one(*id, path, dim))
        .collect()
}

fn read_one(id: usize, path: &Path, dim: usize) -> Result<TrajectoryRecord> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        _ => return Err(parse_err(1, format!("expected header `{HEADER}`"))),
    }
    let mut series: Vec<ComponentSeries> = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [c, t, v] = fields[..] else {
            return Err(parse_err(i + 1, "expected three fields".into()));
        };
        let component: usize = c
            .parse()
            .map_err(|_| parse_err(i + 1, format!("bad component `{c}`")))?;
        if component >= dim {
            return Err(parse_err(
                i + 1,
                format!("component {component} outside dimension {dim}"),
            ));
        }
        let t: f64 = t
            .parse()
            .map_err(|_| parse_err(i + 1, format!("bad time `{t}`")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| parse_err(i + 1, format!("bad value `{v}`")))?;
        match series.iter_mut().find(|s| s.component == component) {
            Some(s) => {
                if s.samples.last().is_some_and(|&(prev, _)| t <= prev) {
                    return Err(parse_err(
                        i + 1,
                        "times must increase within a component".into(),
                    ));
                }
                s.samples.push((t, v));
            }
            None => series.push(ComponentSeries {
                component,
                samples: vec![(t, v)],
            }),
        }
    }
    let initial = (0..dim)
        .map(|i| {
            series
                .iter()
                .find(|s| s.component == i)
                .and_then(|s| s.value_at(0.0))
                .unwrap_or(f64::NAN)
        })
        .collect();
    Ok(TrajectoryRecord {
        id,
        initial,
        series,
        truth: None,
    })
}
