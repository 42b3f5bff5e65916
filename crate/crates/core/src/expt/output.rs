//! Writing run results to disk.
//!
//! A run directory holds `config.json`, `pulses.{csv,json}`,
//! `field_traces.{csv,json}` and `summary.json`. Every row carries the crate
//! version, the config fingerprint, the seed and the trajectory index, so
//! files from different runs can be concatenated safely.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expt::config::{ExperimentConfig, OutputFormat};
use crate::meas::TrajectoryRecord;
use crate::VERSION;

/// Relative output directories are resolved against this variable when set.
pub const OUTPUT_ROOT_ENV: &str = "F2F_OUTPUT_ROOT";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseRow {
    pub version: String,
    pub fingerprint: String,
    pub seed: u64,
    pub trajectory: u64,
    pub initial_m: u64,
    pub pulse: u64,
    pub phi: f64,
    pub n1: u64,
    pub n2: u64,
    pub detections: u64,
    pub p1_first: Option<f64>,
    pub mean_n: f64,
    pub abs_b: f64,
    pub arg_b: f64,
    pub branch_fidelity: Option<f64>,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub version: String,
    pub fingerprint: String,
    pub seed: u64,
    pub trajectory: u64,
    pub pulse: u64,
    pub t: f64,
    pub field: f64,
}

pub fn pulse_rows(records: &[TrajectoryRecord]) -> Vec<PulseRow> {
    records
        .iter()
        .flat_map(|r| {
            r.pulses.iter().map(move |p| PulseRow {
                version: VERSION.to_string(),
                fingerprint: r.fingerprint.clone(),
                seed: r.seed,
                trajectory: r.trajectory,
                initial_m: r.initial_m,
                pulse: p.pulse,
                phi: p.phi,
                n1: p.n1,
                n2: p.n2,
                detections: p.detections,
                p1_first: p.p1_first,
                mean_n: p.summary.mean_n,
                abs_b: p.summary.abs_b,
                arg_b: p.summary.arg_b,
                branch_fidelity: p.branch_fidelity,
                truncated: p.truncated,
            })
        })
        .collect()
}

pub fn trace_rows(records: &[TrajectoryRecord]) -> Vec<TraceRow> {
    let mut rows = Vec::new();
    for r in records {
        for tr in &r.traces {
            for (&t, &field) in tr.times.iter().zip(&tr.values) {
                rows.push(TraceRow {
                    version: VERSION.to_string(),
                    fingerprint: r.fingerprint.clone(),
                    seed: r.seed,
                    trajectory: r.trajectory,
                    pulse: tr.pulse,
                    t,
                    field,
                });
            }
        }
    }
    rows
}

/// Resolves the run directory: `override_dir`, then `output.dir`, then
/// `runs/<fingerprint>`. Relative paths sit under `$F2F_OUTPUT_ROOT` if set.
pub fn output_dir(config: &ExperimentConfig, override_dir: Option<&Path>) -> PathBuf {
    let dir = match (override_dir, &config.output.dir) {
        (Some(d), _) => d.to_path_buf(),
        (None, Some(d)) => PathBuf::from(d),
        (None, None) => PathBuf::from("runs").join(config.fingerprint()),
    };
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if dir.is_relative() => PathBuf::from(root).join(dir),
        _ => dir,
    }
}

fn write_rows<T: Serialize>(dir: &Path, stem: &str, rows: &[T], format: OutputFormat) -> Result<PathBuf> {
    match format {
        OutputFormat::Csv => {
            let path = dir.join(format!("{stem}.csv"));
            let mut w = csv::Writer::from_path(&path).map_err(|e| Error::Io(e.to_string()))?;
            for row in rows {
                w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
            }
            w.flush()?;
            Ok(path)
        }
        OutputFormat::Json => {
            let path = dir.join(format!("{stem}.json"));
            write_json(&path, &rows)?;
            Ok(path)
        }
    }
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Writes a complete run directory and returns its path. Output is a pure
/// function of the inputs.
pub fn write_run<S: Serialize>(
    dir: &Path,
    config: &ExperimentConfig,
    records: &[TrajectoryRecord],
    summary: &S,
    format: OutputFormat,
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    write_rows(dir, "pulses", &pulse_rows(records), format)?;
    write_rows(dir, "field_traces", &trace_rows(records), format)?;
    write_summary(dir, config, records.len(), summary)?;
    Ok(dir.to_path_buf())
}

/// Writes `config.json` and `summary.json` only, for runs without
/// per-trajectory rows.
pub fn write_summary<S: Serialize>(
    dir: &Path,
    config: &ExperimentConfig,
    trajectories: usize,
    summary: &S,
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    write_json(&dir.join("config.json"), config)?;
    let wrapped = serde_json::json!({
        "version": VERSION,
        "fingerprint": config.fingerprint(),
        "seed": config.run.seed,
        "trajectories": trajectories,
        "summary": summary,
    });
    write_json(&dir.join("summary.json"), &wrapped)?;
    Ok(dir.to_path_buf())
}

/// Reads back `pulses.csv` or `pulses.json`.
pub fn read_pulses(path: &Path) -> Result<Vec<PulseRow>> {
    if path.extension().is_some_and(|e| e == "json") {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Io(e.to_string()))
    } else {
        let mut r = csv::Reader::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
        r.deserialize().map(|row| row.map_err(|e| Error::Io(e.to_string()))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expt::pipeline::run_ensemble;

    fn small() -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.laser.mean_n = 400.0;
        c.counts = crate::meas::CountModel::Poisson { mu: 6.0 };
        c.run.pulses = 4;
        c.run.trajectories = 2;
        c.run.trace_pulses = vec![0, 4];
        c.run.trace_points = 16;
        c
    }

    #[test]
    fn csv_and_json_agree() {
        let cfg = small();
        let records = run_ensemble(&cfg).unwrap();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        write_run(a.path(), &cfg, &records, &(), OutputFormat::Csv).unwrap();
        write_run(b.path(), &cfg, &records, &(), OutputFormat::Json).unwrap();
        let x = read_pulses(&a.path().join("pulses.csv")).unwrap();
        let y = read_pulses(&b.path().join("pulses.json")).unwrap();
        assert_eq!(x.len(), 8);
        assert_eq!(x.len(), y.len());
        let close = |p: f64, q: f64| (p - q).abs() <= 1e-12 * p.abs().max(1.0);
        for (p, q) in x.iter().zip(&y) {
            assert_eq!((p.trajectory, p.pulse, p.n1, p.n2), (q.trajectory, q.pulse, q.n1, q.n2));
            assert!(close(p.phi, q.phi) && close(p.mean_n, q.mean_n));
            assert!(close(p.abs_b, q.abs_b) && close(p.arg_b, q.arg_b));
            assert_eq!(p.fingerprint, cfg.fingerprint());
        }
    }

    #[test]
    fn rewriting_is_byte_identical() {
        let cfg = small();
        let d = tempfile::tempdir().unwrap();
        let first = write_run(&d.path().join("one"), &cfg, &run_ensemble(&cfg).unwrap(), &(), OutputFormat::Csv).unwrap();
        let second = write_run(&d.path().join("two"), &cfg, &run_ensemble(&cfg).unwrap(), &(), OutputFormat::Csv).unwrap();
        for f in ["config.json", "pulses.csv", "field_traces.csv", "summary.json"] {
            assert_eq!(fs::read(first.join(f)).unwrap(), fs::read(second.join(f)).unwrap(), "{f}");
        }
    }
}
