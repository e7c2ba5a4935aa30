//! Experiment orchestration: configuration, seeded trial loops, sweeps and output files.

mod config;
mod sweep;
mod trials;

use std::io::Write;
use std::path::Path;

use serde::Serialize;

pub use config::{AttackSpec, ExperimentConfig, Outputs, Thresholds, TopologySpec};
pub use sweep::{sweep, SweepParameter, SweepRow};
pub use trials::{derive_seed, run_trials, Spread, Stage, Summary, ThresholdResult, TrialRow, TrialsReport};

use crate::error::Result;

/// Writes serializable rows as CSV with a header line.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    write_csv(rows, std::fs::File::create(path)?)
}

pub fn write_json_file<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Runs `config` and writes the configured output files.
pub fn run_and_write(config: &ExperimentConfig) -> Result<TrialsReport> {
    let report = run_trials(config)?;
    if let Some(p) = &config.outputs.trials_csv {
        write_csv_file(&report.rows, p)?;
    }
    if let Some(p) = &config.outputs.summary_json {
        write_json_file(&report.summary, p)?;
    }
    Ok(report)
}
