use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{AgentConfig, ExperimentConfig, RegretReference};
use super::records::{write_atomic, write_metrics, write_trace, RunMetrics};
use crate::agents::{Agent, Phase, Transition};
use crate::error::{Error, Result};
use crate::mdp::TabularMdp;
use crate::metrics::{check_good_action, regret_trace, running_average, RunMeta, RunRecord, StepRecord};
use crate::planning::{
    evaluate_policy, greedy_policy, k_step_rewards, optimal_start_values, thresholding_policy,
    KStepRewardTable,
};
use crate::rng::{split_seed, RngStream};

/// Every run starts here.
pub const START_STATE: usize = 0;
/// Maximum number of points per curve.
pub const MAX_CURVE_POINTS: usize = 2000;

/// Shared subsampling grid of `0..=T`, at most [`MAX_CURVE_POINTS`] points,
/// always containing both ends.
pub fn curve_grid(horizon: usize) -> Vec<usize> {
    let n = horizon + 1;
    if n <= MAX_CURVE_POINTS {
        return (0..n).collect();
    }
    let last = MAX_CURVE_POINTS - 1;
    (0..MAX_CURVE_POINTS)
        .map(|i| ((i as u128 * horizon as u128 + last as u128 / 2) / last as u128) as usize)
        .collect()
}

/// Play `agent` on `mdp` for decisions `t = 0..=T` from [`START_STATE`].
pub fn simulate(
    mdp: &TabularMdp,
    agent: &mut dyn Agent,
    horizon: usize,
    env_rng: &mut RngStream,
) -> Vec<StepRecord> {
    let mut state = START_STATE;
    let mut steps = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        let action = agent.select_action(state, t);
        let reward = mdp.sample_reward(state, action, env_rng);
        let next_state = mdp.sample_transition(state, action, env_rng);
        agent.observe(&Transition {
            t,
            state,
            action,
            reward,
            next_state,
        });
        steps.push(StepRecord {
            t,
            state,
            action,
            reward,
            phase: agent.phase(),
        });
        state = next_state;
    }
    steps
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyOracle {
    pub k: usize,
    pub value: f64,
    /// `value / V*`, when `V* > 0`.
    pub competitive_ratio: Option<f64>,
    /// `V* − value`.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOracle {
    pub k: usize,
    pub gamma: crate::agents::ThresholdSchedule,
    pub value: f64,
}

/// Exact start-state values of the oracle policies on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub instance_hash: String,
    pub horizon: usize,
    pub optimal_value: Option<f64>,
    pub greedy: Vec<GreedyOracle>,
    pub thresholding: Vec<ThresholdOracle>,
}

/// SHA-256 of the serialized instance.
pub fn instance_hash(mdp: &TabularMdp) -> Result<String> {
    Ok(hex::encode(Sha256::digest(mdp.to_json()?.as_bytes())))
}

fn oracle_key(config: &ExperimentConfig, instance_hash: &str) -> Result<String> {
    let text = format!(
        "{instance_hash}|{}|{}",
        config.horizon,
        serde_json::to_string(&config.oracles)?
    );
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

pub fn compute_oracles(config: &ExperimentConfig, mdp: &TabularMdp) -> Result<OracleSummary> {
    let horizon = config.horizon;
    let optimal = (config.oracles.optimal || !config.oracles.greedy.is_empty())
        .then(|| optimal_start_values(mdp, horizon)[START_STATE]);
    let greedy = config
        .oracles
        .greedy
        .iter()
        .map(|&k| {
            let value = evaluate_policy(mdp, &greedy_policy(mdp, k, horizon)).v(0, START_STATE);
            GreedyOracle {
                k,
                value,
                competitive_ratio: optimal.filter(|v| *v > 0.0).map(|v| value / v),
                gap: optimal.map(|v| v - value),
            }
        })
        .collect();
    let thresholding = config
        .oracles
        .thresholding
        .iter()
        .map(|reference| {
            let policy = thresholding_policy(mdp, reference.k, &reference.gamma, horizon)?;
            Ok(ThresholdOracle {
                k: reference.k,
                gamma: reference.gamma.clone(),
                value: evaluate_policy(mdp, &policy).v(0, START_STATE),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleSummary {
        instance_hash: instance_hash(mdp)?,
        horizon,
        optimal_value: optimal.filter(|_| config.oracles.optimal),
        greedy,
        thresholding,
    })
}

/// Oracle values, read from `<out>/oracles/<key>.json` when present.
pub fn cached_oracles(config: &ExperimentConfig, mdp: &TabularMdp, out: &Path) -> Result<OracleSummary> {
    let hash = instance_hash(mdp)?;
    let path = out.join("oracles").join(format!("{}.json", oracle_key(config, &hash)?));
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(summary) = serde_json::from_str::<OracleSummary>(&text) {
            if summary.instance_hash == hash && summary.horizon == config.horizon {
                return Ok(summary);
            }
        }
        log::warn!("ignoring unreadable oracle cache {}", path.display());
    }
    let summary = compute_oracles(config, mdp)?;
    write_atomic(&path, serde_json::to_string_pretty(&summary)?.as_bytes())?;
    Ok(summary)
}

pub fn compute_run_metrics(
    record: &RunRecord,
    table: &KStepRewardTable,
    assumption_holds: bool,
) -> RunMetrics {
    let meta = &record.meta;
    let rewards = record.rewards();
    let average = running_average(&rewards);
    let regret = regret_trace(&record.steps, table, &meta.gamma, meta.k, meta.horizon);
    let grid = curve_grid(meta.horizon);
    let mut phase_counts = [0; 3];
    for step in &record.steps {
        phase_counts[match step.phase {
            Phase::Exploit => 0,
            Phase::Explore => 1,
            Phase::Subroutine => 2,
        }] += 1;
    }
    RunMetrics {
        meta: meta.clone(),
        total_reward: rewards.iter().sum(),
        final_regret: *regret.last().expect("runs have at least one step"),
        phase_counts,
        assumption_holds,
        running_average: grid.iter().map(|&t| average[t]).collect(),
        regret: grid.iter().map(|&t| regret[t]).collect(),
        curve_t: grid,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceEntry {
    pub index: usize,
    pub hash: String,
    pub oracles: OracleSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub instance: usize,
    pub rep: usize,
    pub agent: String,
    pub seed: u64,
    /// Relative to the output directory.
    pub metrics: PathBuf,
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub instance: usize,
    pub rep: Option<usize>,
    pub agent: Option<String>,
    pub error: String,
}

/// Everything needed to locate and interpret an experiment's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub environment: String,
    pub agents: Vec<String>,
    pub instances: Vec<InstanceEntry>,
    pub runs: Vec<RunEntry>,
    pub failures: Vec<RunFailure>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

fn slug(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.=".contains(c) { c } else { '_' })
        .collect()
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".into())
}

struct Instance {
    index: usize,
    mdp: TabularMdp,
    table: KStepRewardTable,
    oracles: OracleSummary,
}

fn prepare_instance(config: &ExperimentConfig, index: usize, depth: usize, out: &Path) -> Result<Instance> {
    let mdp = config.build_instance(index)?;
    let oracles = cached_oracles(config, &mdp, out)?;
    let table = k_step_rewards(&mdp, depth);
    Ok(Instance {
        index,
        mdp,
        table,
        oracles,
    })
}

#[allow(clippy::too_many_arguments)]
fn execute_run(
    config: &ExperimentConfig,
    instance: &Instance,
    agent_index: usize,
    agent_config: &AgentConfig,
    reference: &RegretReference,
    assumption_holds: bool,
    rep: usize,
    out: &Path,
) -> Result<RunEntry> {
    let seed = config.run_seed(instance.index, rep);
    let mdp = &instance.mdp;
    let mut agent = agent_config.build(
        mdp.num_states(),
        mdp.num_actions(),
        config.horizon,
        RngStream::derive(seed, 1),
    );
    let mut env_rng = RngStream::new(split_seed(seed, 0));
    let steps = simulate(mdp, agent.as_mut(), config.horizon, &mut env_rng);
    let record = RunRecord {
        meta: RunMeta {
            algorithm: agent_config.algorithm.as_str().into(),
            agent: agent_config.label(),
            environment: config.environment.id(),
            instance: instance.index,
            seed,
            horizon: config.horizon,
            k: reference.k,
            gamma: reference.gamma.clone(),
        },
        steps,
    };
    let metrics = compute_run_metrics(&record, &instance.table, assumption_holds);
    let dir = PathBuf::from("runs").join(format!("a{agent_index:02}-{}", slug(&agent_config.label())));
    let stem = format!("i{:04}-r{rep:03}", instance.index);
    let metrics_path = dir.join(format!("{stem}.json"));
    write_metrics(&out.join(&metrics_path), &metrics)?;
    let trace = if config.keep_traces {
        let path = dir.join(format!("{stem}.csv"));
        write_trace(&out.join(&path), &record)?;
        Some(path)
    } else {
        None
    };
    Ok(RunEntry {
        instance: instance.index,
        rep,
        agent: agent_config.label(),
        seed,
        metrics: metrics_path,
        trace,
    })
}

/// Run every (instance, agent, repetition) of `config`, writing per-run files
/// and `manifest.json` under `out`. Failed runs are recorded in the manifest
/// and do not stop the others.
pub fn run_experiment(config: &ExperimentConfig, out: &Path) -> Result<Manifest> {
    config.validate()?;
    std::fs::create_dir_all(out)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = config.jobs {
        builder = builder.num_threads(jobs);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_in_pool(config, out))
}

fn run_in_pool(config: &ExperimentConfig, out: &Path) -> Result<Manifest> {
    let references: Vec<RegretReference> = config
        .agents
        .iter()
        .map(|a| a.regret_reference(&config.regret))
        .collect();
    let depth = references.iter().map(|r| r.k).max().unwrap_or(1);

    let prepared: Vec<Result<Instance>> = (0..config.instance_count())
        .into_par_iter()
        .map(|i| {
            catch_unwind(AssertUnwindSafe(|| prepare_instance(config, i, depth, out)))
                .unwrap_or_else(|p| Err(Error::Config(panic_message(p))))
        })
        .collect();
    let mut failures = Vec::new();
    let mut instances = Vec::new();
    for (index, result) in prepared.into_iter().enumerate() {
        match result {
            Ok(instance) => instances.push(instance),
            Err(e) => failures.push(RunFailure {
                instance: index,
                rep: None,
                agent: None,
                error: e.to_string(),
            }),
        }
    }
    if instances.is_empty() {
        if let Some(first) = failures.first() {
            return Err(Error::Config(format!("no instance could be built: {}", first.error)));
        }
    }

    // (instance position, agent, rep) in a fixed order.
    let mut tasks = Vec::new();
    for (pos, instance) in instances.iter().enumerate() {
        let checks: Vec<bool> = references
            .iter()
            .map(|r| check_good_action(&instance.table, &r.gamma, r.k, config.horizon).holds())
            .collect();
        for (agent_index, _) in config.agents.iter().enumerate() {
            for rep in 0..config.seeds.count {
                tasks.push((pos, agent_index, rep, checks[agent_index]));
            }
        }
    }
    let results: Vec<(usize, usize, usize, Result<RunEntry>)> = tasks
        .into_par_iter()
        .map(|(pos, agent_index, rep, holds)| {
            let instance = &instances[pos];
            let result = catch_unwind(AssertUnwindSafe(|| {
                execute_run(
                    config,
                    instance,
                    agent_index,
                    &config.agents[agent_index],
                    &references[agent_index],
                    holds,
                    rep,
                    out,
                )
            }))
            .unwrap_or_else(|p| Err(Error::Config(panic_message(p))));
            (instance.index, agent_index, rep, result)
        })
        .collect();

    let mut runs = Vec::new();
    for (instance, agent_index, rep, result) in results {
        match result {
            Ok(entry) => runs.push(entry),
            Err(e) => {
                log::warn!("run failed: instance {instance}, agent {agent_index}, rep {rep}: {e}");
                failures.push(RunFailure {
                    instance,
                    rep: Some(rep),
                    agent: Some(config.agents[agent_index].label()),
                    error: e.to_string(),
                })
            }
        }
    }
    let config_json = serde_json::to_string(config)?;
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: hex::encode(Sha256::digest(config_json.as_bytes())),
        config: config.clone(),
        environment: config.environment.id(),
        agents: config.agents.iter().map(|a| a.label()).collect(),
        instances: instances
            .into_iter()
            .map(|i| InstanceEntry {
                index: i.index,
                hash: i.oracles.instance_hash.clone(),
                oracles: i.oracles,
            })
            .collect(),
        runs,
        failures,
    };
    write_atomic(
        &out.join(MANIFEST_FILE),
        serde_json::to_string_pretty(&manifest)?.as_bytes(),
    )?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(dir.join(MANIFEST_FILE))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        assert_eq!(curve_grid(4), vec![0, 1, 2, 3, 4]);
        let grid = curve_grid(20_000);
        assert_eq!(grid.len(), MAX_CURVE_POINTS);
        assert_eq!(grid[0], 0);
        assert_eq!(*grid.last().unwrap(), 20_000);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(curve_grid(1999).len(), 2000);
        assert_eq!(curve_grid(2000).len(), 2000);
        assert!(curve_grid(2000).windows(2).all(|w| w[0] < w[1]));
    }
}
