//! Seeded experiment pipeline: configs, parallel runs, oracle caching and
//! aggregation into CSV.
//!
//! Output layout under the experiment directory:
//!
//! ```text
//! manifest.json            config, instances with oracle values, run list
//! oracles/<sha256>.json    cached oracle values per instance
//! runs/aNN-<agent>/iIIII-rRRR.json   per-run metrics on the curve grid
//! runs/aNN-<agent>/iIIII-rRRR.csv    per-step trace (optional)
//! summary.csv              environment,agent,metric,mean,stderr,n
//! curves.csv               environment,agent,t,mean,stderr (running average)
//! regret_curves.csv        same columns, cumulative regret
//! ```

mod aggregate;
mod config;
pub mod presets;
mod records;
mod runner;

pub use aggregate::{
    aggregate, aggregate_manifest, AggregateReport, CurveRow, SummaryRow, CURVES_FILE,
    REGRET_CURVES_FILE, SUMMARY_FILE,
};
pub use config::{
    Algorithm, AgentConfig, EnvironmentSpec, ExperimentConfig, OracleConfig, RegretReference,
    SeedConfig, DEFAULT_HORIZON, SEED_ENV_VAR,
};
pub use records::{
    read_metrics, read_trace, trace_to_string, write_atomic, write_metrics, write_trace, RunMetrics,
};
pub use runner::{
    cached_oracles, compute_oracles, compute_run_metrics, curve_grid, instance_hash, read_manifest,
    run_experiment, simulate, GreedyOracle, InstanceEntry, Manifest, OracleSummary, RunEntry,
    RunFailure, ThresholdOracle, MANIFEST_FILE, MAX_CURVE_POINTS, START_STATE,
};
