//! CSV emitters for run traces and batch summaries.
//!
//! Traces use the fixed header `t,action,obs_food,obs_satiety,<belief
//! columns>,food_level,satiety_level,alive` with one belief column per
//! factor level, UTF-8 and LF line endings. Output is a pure function of the
//! record, so re-emitting is byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{BatchSummary, RunRecord};

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
    }
    fs::write(path, content).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Render a trace to CSV text.
pub fn record_csv(record: &RunRecord) -> String {
    let mut out = String::new();
    out.push_str("t,action,obs_food,obs_satiety");
    if let Some(first) = record.rows.first() {
        for (f, belief) in first.beliefs.iter().enumerate() {
            let name = record
                .factor_names
                .get(f)
                .map(String::as_str)
                .unwrap_or("factor");
            for level in 0..belief.len() {
                let _ = write!(out, ",belief_{name}_{level}");
            }
        }
    }
    out.push_str(",food_level,satiety_level,alive\n");
    for row in &record.rows {
        let _ = write!(out, "{},{}", row.t, row.action);
        for &o in &row.obs {
            let _ = write!(out, ",{o}");
        }
        for belief in &row.beliefs {
            for &p in belief {
                let _ = write!(out, ",{p:.6}");
            }
        }
        let _ = writeln!(
            out,
            ",{:.6},{:.6},{}",
            row.food_level,
            row.satiety_level,
            if row.alive { 1 } else { 0 }
        );
    }
    out
}

/// Write one episode trace.
pub fn write_record_csv(record: &RunRecord, path: &Path) -> Result<()> {
    write_file(path, &record_csv(record))
}

/// Render per-run survival times to CSV text.
pub fn survival_csv(summary: &BatchSummary) -> String {
    let mut out = String::from("scenario,agent,run,survival_time\n");
    for (agent, runs) in summary.survival.iter().enumerate() {
        for (run, &survival) in runs.iter().enumerate() {
            let _ = writeln!(out, "{},{agent},{run},{survival}", summary.scenario_id);
        }
    }
    out
}

/// Write the per-run survival table.
pub fn write_survival_csv(summary: &BatchSummary, path: &Path) -> Result<()> {
    write_file(path, &survival_csv(summary))
}

/// Render the per-timestep aggregate trajectories to CSV text.
pub fn timeseries_csv(summary: &BatchSummary) -> String {
    let mut out = String::from("t,runs_alive,eat_frequency,mean_food_level,mean_satiety_level\n");
    for t in 0..summary.timesteps {
        let _ = writeln!(
            out,
            "{t},{},{:.6},{:.6},{:.6}",
            summary.runs_alive[t],
            summary.eat_frequency[t],
            summary.mean_food[t],
            summary.mean_satiety[t]
        );
    }
    out
}

/// Write the per-timestep aggregate table.
pub fn write_timeseries_csv(summary: &BatchSummary, path: &Path) -> Result<()> {
    write_file(path, &timeseries_csv(summary))
}
