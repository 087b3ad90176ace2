//! On-disk formats of a single run.
//!
//! A trace file is CSV with a leading `# meta <json>` line followed by the
//! header `t,state,action,reward,phase`. The run summary is a JSON
//! [`RunMetrics`] document.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agents::Phase;
use crate::error::{Error, Result};
use crate::metrics::{RunMeta, RunRecord, StepRecord};

const META_PREFIX: &str = "# meta ";

#[derive(Serialize, Deserialize)]
struct TraceRow {
    t: usize,
    state: usize,
    action: usize,
    reward: f64,
    phase: String,
}

/// Write `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn trace_to_string(record: &RunRecord) -> Result<String> {
    let mut out = Vec::new();
    writeln!(out, "{META_PREFIX}{}", serde_json::to_string(&record.meta)?)?;
    {
        let mut writer = csv::Writer::from_writer(&mut out);
        for step in &record.steps {
            writer.serialize(TraceRow {
                t: step.t,
                state: step.state,
                action: step.action,
                reward: step.reward,
                phase: step.phase.as_str().into(),
            })?;
        }
        writer.flush()?;
    }
    String::from_utf8(out).map_err(|e| Error::Config(e.to_string()))
}

pub fn write_trace(path: &Path, record: &RunRecord) -> Result<()> {
    write_atomic(path, trace_to_string(record)?.as_bytes())
}

pub fn read_trace(path: &Path) -> Result<RunRecord> {
    let corrupt = |reason: String| Error::CorruptRun {
        path: path.display().to_string(),
        reason,
    };
    let mut reader = BufReader::new(fs::File::open(path)?);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let meta_json = first
        .trim_end()
        .strip_prefix(META_PREFIX)
        .ok_or_else(|| corrupt("missing meta line".into()))?;
    let meta: RunMeta = serde_json::from_str(meta_json).map_err(|e| corrupt(e.to_string()))?;
    let mut csv_reader = csv::Reader::from_reader(reader);
    let mut steps = Vec::with_capacity(meta.horizon + 1);
    for row in csv_reader.deserialize::<TraceRow>() {
        let row = row.map_err(|e| corrupt(e.to_string()))?;
        let phase: Phase = row.phase.parse().map_err(corrupt)?;
        steps.push(StepRecord {
            t: row.t,
            state: row.state,
            action: row.action,
            reward: row.reward,
            phase,
        });
    }
    let record = RunRecord { meta, steps };
    record.validate().map_err(|e| corrupt(e.to_string()))?;
    Ok(record)
}

/// Per-run results used by aggregation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub meta: RunMeta,
    pub total_reward: f64,
    pub final_regret: f64,
    /// Steps by phase: exploit, explore, subroutine.
    pub phase_counts: [usize; 3],
    /// The good-action assumption held for the regret reference.
    pub assumption_holds: bool,
    /// Grid points of the curves.
    pub curve_t: Vec<usize>,
    pub running_average: Vec<f64>,
    pub regret: Vec<f64>,
}

pub fn write_metrics(path: &Path, metrics: &RunMetrics) -> Result<()> {
    write_atomic(path, serde_json::to_string(metrics)?.as_bytes())
}

pub fn read_metrics(path: &Path) -> Result<RunMetrics> {
    let text = fs::read_to_string(path)?;
    let metrics: RunMetrics = serde_json::from_str(&text).map_err(|e| Error::CorruptRun {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let n = metrics.curve_t.len();
    if n == 0 || metrics.running_average.len() != n || metrics.regret.len() != n {
        return Err(Error::CorruptRun {
            path: path.display().to_string(),
            reason: "curve lengths disagree".into(),
        });
    }
    Ok(metrics)
}
