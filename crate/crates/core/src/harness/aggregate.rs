use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::records::{read_metrics, write_atomic, RunMetrics};
use super::runner::{read_manifest, Manifest};
use crate::error::Result;
use crate::metrics::mean_stderr;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const CURVES_FILE: &str = "curves.csv";
pub const REGRET_CURVES_FILE: &str = "regret_curves.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub environment: String,
    pub agent: String,
    pub metric: String,
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub environment: String,
    pub agent: String,
    pub t: usize,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AggregateReport {
    pub summary: Vec<SummaryRow>,
    pub curves: Vec<CurveRow>,
    pub regret_curves: Vec<CurveRow>,
    /// Run files that were missing or unreadable.
    pub problems: Vec<String>,
}

fn row(environment: &str, agent: &str, metric: &str, values: &[f64]) -> SummaryRow {
    let (mean, stderr) = mean_stderr(values);
    SummaryRow {
        environment: environment.into(),
        agent: agent.into(),
        metric: metric.into(),
        mean,
        stderr,
        n: values.len(),
    }
}

fn curve_rows(environment: &str, agent: &str, runs: &[&RunMetrics], pick: fn(&RunMetrics) -> &[f64]) -> Vec<CurveRow> {
    let grid = &runs[0].curve_t;
    (0..grid.len())
        .map(|i| {
            let values: Vec<f64> = runs.iter().map(|r| pick(r)[i]).collect();
            let (mean, stderr) = mean_stderr(&values);
            CurveRow {
                environment: environment.into(),
                agent: agent.into(),
                t: grid[i],
                mean,
                stderr,
            }
        })
        .collect()
}

/// Summaries and mean curves from the per-run files listed in `manifest`.
pub fn aggregate_manifest(manifest: &Manifest, dir: &Path) -> AggregateReport {
    let env = manifest.environment.as_str();
    let mut report = AggregateReport::default();
    for failure in &manifest.failures {
        report.problems.push(format!(
            "failed run: instance {}, rep {:?}, agent {:?}: {}",
            failure.instance, failure.rep, failure.agent, failure.error
        ));
    }
    let mut by_agent: BTreeMap<&str, Vec<RunMetrics>> = BTreeMap::new();
    for entry in &manifest.runs {
        match read_metrics(&dir.join(&entry.metrics)) {
            Ok(m) => by_agent.entry(entry.agent.as_str()).or_default().push(m),
            Err(e) => report
                .problems
                .push(format!("{}: {e}", entry.metrics.display())),
        }
    }
    for agent in &manifest.agents {
        let Some(runs) = by_agent.get(agent.as_str()) else {
            continue;
        };
        // Curves need a common grid; drop runs that disagree with the first.
        let grid = &runs[0].curve_t;
        let usable: Vec<&RunMetrics> = runs.iter().filter(|r| &r.curve_t == grid).collect();
        if usable.len() != runs.len() {
            report
                .problems
                .push(format!("{agent}: {} runs on a different grid", runs.len() - usable.len()));
        }
        let values = |f: fn(&RunMetrics) -> f64| usable.iter().map(|r| f(r)).collect::<Vec<f64>>();
        report.summary.push(row(env, agent, "cumulative_reward", &values(|r| r.total_reward)));
        report.summary.push(row(env, agent, "final_regret", &values(|r| r.final_regret)));
        report.summary.push(row(
            env,
            agent,
            "final_running_average",
            &values(|r| *r.running_average.last().expect("nonempty curve")),
        ));
        report.summary.push(row(
            env,
            agent,
            "explore_fraction",
            &values(|r| (r.phase_counts[1] + r.phase_counts[2]) as f64 / (r.meta.horizon + 1) as f64),
        ));
        report.summary.push(row(
            env,
            agent,
            "assumption_violated",
            &values(|r| if r.assumption_holds { 0.0 } else { 1.0 }),
        ));
        report.curves.extend(curve_rows(env, agent, &usable, |r| &r.running_average));
        report.regret_curves.extend(curve_rows(env, agent, &usable, |r| &r.regret));
    }

    let oracles: Vec<_> = manifest.instances.iter().map(|i| &i.oracles).collect();
    let optimal: Vec<f64> = oracles.iter().filter_map(|o| o.optimal_value).collect();
    if !optimal.is_empty() {
        report.summary.push(row(env, "oracle:optimal", "value", &optimal));
    }
    let mut greedy_k: Vec<usize> = oracles.iter().flat_map(|o| o.greedy.iter().map(|g| g.k)).collect();
    greedy_k.sort_unstable();
    greedy_k.dedup();
    for k in greedy_k {
        let agent = format!("oracle:greedy-K{k}");
        let entries: Vec<_> = oracles.iter().flat_map(|o| o.greedy.iter().filter(|g| g.k == k)).collect();
        let value: Vec<f64> = entries.iter().map(|g| g.value).collect();
        report.summary.push(row(env, &agent, "value", &value));
        let ratio: Vec<f64> = entries.iter().filter_map(|g| g.competitive_ratio).collect();
        if !ratio.is_empty() {
            report.summary.push(row(env, &agent, "competitive_ratio", &ratio));
        }
        let gap: Vec<f64> = entries.iter().filter_map(|g| g.gap).collect();
        if !gap.is_empty() {
            report.summary.push(row(env, &agent, "gap", &gap));
        }
    }
    for (i, reference) in manifest.config.oracles.thresholding.iter().enumerate() {
        let value: Vec<f64> = oracles
            .iter()
            .filter_map(|o| o.thresholding.get(i))
            .map(|t| t.value)
            .collect();
        if !value.is_empty() {
            let agent = format!("oracle:threshold-K{}#{i}", reference.k);
            report.summary.push(row(env, &agent, "value", &value));
        }
    }
    report
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    write_atomic(path, &bytes)
}

/// Read `manifest.json` in `dir`, aggregate, and write `summary.csv`,
/// `curves.csv` and `regret_curves.csv` there.
pub fn aggregate(dir: &Path) -> Result<AggregateReport> {
    let manifest = read_manifest(dir)?;
    let report = aggregate_manifest(&manifest, dir);
    write_csv(
        &dir.join(SUMMARY_FILE),
        &report.summary,
        &["environment", "agent", "metric", "mean", "stderr", "n"],
    )?;
    let curve_header = ["environment", "agent", "t", "mean", "stderr"];
    write_csv(&dir.join(CURVES_FILE), &report.curves, &curve_header)?;
    write_csv(&dir.join(REGRET_CURVES_FILE), &report.regret_curves, &curve_header)?;
    for problem in &report.problems {
        log::warn!("{problem}");
    }
    Ok(report)
}
