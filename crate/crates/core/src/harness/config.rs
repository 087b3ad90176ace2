use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::agents::baselines::{
    EpisodicQ, EpisodicQConfig, OptimisticQ, OptimisticQConfig, Ucrl2, Ucrl2Config, UniformRandom,
};
use crate::agents::{
    Agent, ExplorationMode, Lg12t, Lg1t, Lg1tConfig, Lg1tRl, Lgkt, LgktConfig, ThresholdSchedule,
};
use crate::envs::{frozen_lake_4x4, gen_synthetic_mdp, jump_riverswim, SyntheticMdpParams};
use crate::error::{Error, Result};
use crate::mdp::TabularMdp;
use crate::planning::build_linear_gap_instance;
use crate::rng::{split_seed, RngStream};

/// Environment variable overriding the master seed.
pub const SEED_ENV_VAR: &str = "LOOKAHEAD_RL_SEED";

pub const DEFAULT_HORIZON: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvironmentSpec {
    Synthetic {
        num_states: usize,
        num_actions: usize,
        #[serde(default = "SyntheticMdpParams::small")]
        params: SyntheticMdpParams,
    },
    #[serde(rename = "jumpriverswim")]
    JumpRiverSwim { max_index: usize },
    #[serde(rename = "frozenlake4x4")]
    FrozenLake4x4,
    /// A serialized [`TabularMdp`].
    File { path: PathBuf },
    LinearGap {
        num_states: usize,
        num_actions: usize,
        k: usize,
    },
}

impl EnvironmentSpec {
    pub fn id(&self) -> String {
        match self {
            EnvironmentSpec::Synthetic {
                num_states,
                num_actions,
                ..
            } => format!("synthetic-S{num_states}-A{num_actions}"),
            EnvironmentSpec::JumpRiverSwim { max_index } => format!("jumpriverswim-{}", max_index + 1),
            EnvironmentSpec::FrozenLake4x4 => "frozenlake4x4".into(),
            EnvironmentSpec::File { path } => format!(
                "file-{}",
                path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
            ),
            EnvironmentSpec::LinearGap {
                num_states,
                num_actions,
                k,
            } => format!("linear_gap-S{num_states}-A{num_actions}-K{k}"),
        }
    }

    /// Only random instances differ between indices.
    pub fn is_random(&self) -> bool {
        matches!(self, EnvironmentSpec::Synthetic { .. })
    }

    /// Build instance `index`; random instances draw from `seed`.
    pub fn build(&self, seed: u64) -> Result<TabularMdp> {
        match self {
            EnvironmentSpec::Synthetic {
                num_states,
                num_actions,
                params,
            } => gen_synthetic_mdp(*num_states, *num_actions, params, &mut RngStream::new(seed)),
            EnvironmentSpec::JumpRiverSwim { max_index } => {
                if *max_index < 2 {
                    return Err(Error::Config("jumpriverswim needs max_index >= 2".into()));
                }
                Ok(jump_riverswim(*max_index))
            }
            EnvironmentSpec::FrozenLake4x4 => Ok(frozen_lake_4x4()),
            EnvironmentSpec::File { path } => TabularMdp::from_json(&std::fs::read_to_string(path)?),
            EnvironmentSpec::LinearGap {
                num_states,
                num_actions,
                k,
            } => {
                if *num_states < 2 || *num_actions < 2 || *k < 1 {
                    return Err(Error::Config(
                        "linear_gap needs at least 2 states, 2 actions and K >= 1".into(),
                    ));
                }
                Ok(build_linear_gap_instance(*num_states, *num_actions, *k))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Lg1t,
    Lgkt,
    Lg12t,
    Lg1tRl,
    Ucrl2,
    QEpisodic,
    OptimisticQ,
    Uniform,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Lg1t => "lg1t",
            Algorithm::Lgkt => "lgkt",
            Algorithm::Lg12t => "lg12t",
            Algorithm::Lg1tRl => "lg1t_rl",
            Algorithm::Ucrl2 => "ucrl2",
            Algorithm::QEpisodic => "q_episodic",
            Algorithm::OptimisticQ => "optimistic_q",
            Algorithm::Uniform => "uniform",
        }
    }

    /// Learners that threshold against a lookahead reward.
    pub fn is_thresholding(&self) -> bool {
        matches!(
            self,
            Algorithm::Lg1t | Algorithm::Lgkt | Algorithm::Lg12t | Algorithm::Lg1tRl
        )
    }
}

/// Declarative agent description. Fields that do not apply to the chosen
/// algorithm are ignored; missing ones take the defaults listed per field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    pub algorithm: Algorithm,
    /// Name in outputs; defaults to a name built from the parameters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Lookahead depth of `lgkt` (default 2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Threshold: 0.3 for the one-step learners, 0.9 for `lgkt`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<ThresholdSchedule>,
    /// Threshold of the `lg12t` tail (default 0.9).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_tail: Option<ThresholdSchedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exploration: Option<ExplorationMode>,
    /// Change time of the hybrids (100 for `lg12t`, 10 000 for `lg1t_rl`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_c: Option<usize>,
    /// Confidence level of `ucrl2` and the Q-learners (default 0.05).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Discount of `optimistic_q` (default 0.99).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discount: Option<f64>,
    /// Pseudo-episode length of `q_episodic` (default 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub episode_len: Option<usize>,
}

impl AgentConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            label: None,
            k: None,
            gamma: None,
            gamma_tail: None,
            eta: None,
            p: None,
            exploration: None,
            t_c: None,
            delta: None,
            discount: None,
            episode_len: None,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma.into());
        self
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn k(&self) -> usize {
        match self.algorithm {
            Algorithm::Lgkt => self.k.unwrap_or(2),
            Algorithm::Lg12t => 2,
            _ => 1,
        }
    }

    pub fn gamma(&self) -> ThresholdSchedule {
        self.gamma.clone().unwrap_or_else(|| match self.algorithm {
            Algorithm::Lgkt => 0.9.into(),
            _ => 0.3.into(),
        })
    }

    pub fn gamma_tail(&self) -> ThresholdSchedule {
        self.gamma_tail.clone().unwrap_or(0.9.into())
    }

    pub fn t_c(&self) -> usize {
        self.t_c.unwrap_or(match self.algorithm {
            Algorithm::Lg1tRl => 10_000,
            _ => 100,
        })
    }

    fn delta(&self) -> f64 {
        self.delta.unwrap_or(0.05)
    }

    fn discount(&self) -> f64 {
        self.discount.unwrap_or(0.99)
    }

    fn episode_len(&self) -> usize {
        self.episode_len.unwrap_or(1)
    }

    pub fn label(&self) -> String {
        if let Some(label) = &self.label {
            return label.clone();
        }
        let gamma = |g: &ThresholdSchedule| match g {
            ThresholdSchedule::Constant(v) => format!("{v}"),
            ThresholdSchedule::PerStep(_) => "sched".into(),
        };
        match self.algorithm {
            Algorithm::Lg1t => format!("LG1T[g={}]", gamma(&self.gamma())),
            Algorithm::Lgkt => format!("LG{}T[g={}]", self.k(), gamma(&self.gamma())),
            Algorithm::Lg12t => format!("LG1-2T[tc={}]", self.t_c()),
            Algorithm::Lg1tRl => format!("LG1T-RL[tc={}]", self.t_c()),
            Algorithm::Ucrl2 => "UCRL2".into(),
            Algorithm::QEpisodic => format!("Q[H={}]", self.episode_len()),
            Algorithm::OptimisticQ => format!("OptQ[d={}]", self.discount()),
            Algorithm::Uniform => "Uniform".into(),
        }
    }

    /// The `(K, γ)` this agent's regret is measured against; baselines use
    /// `fallback`.
    pub fn regret_reference(&self, fallback: &RegretReference) -> RegretReference {
        match self.algorithm {
            Algorithm::Lg1t | Algorithm::Lg1tRl | Algorithm::Lgkt => RegretReference {
                k: self.k(),
                gamma: self.gamma(),
            },
            Algorithm::Lg12t => RegretReference {
                k: 2,
                gamma: self.gamma_tail(),
            },
            _ => fallback.clone(),
        }
    }

    pub fn validate(&self, horizon: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("agent {}: {msg}", self.label())));
        if self.algorithm == Algorithm::Lgkt && self.k() < 2 {
            return bad("lgkt needs k >= 2".into());
        }
        if self.algorithm.is_thresholding() {
            self.gamma().check_covers(horizon)?;
        }
        if self.algorithm == Algorithm::Lg12t {
            self.gamma_tail().check_covers(horizon)?;
        }
        if let Some(eta) = self.eta {
            if !(eta > 0.0) {
                return bad(format!("eta must be positive, got {eta}"));
            }
        }
        if let Some(p) = self.p {
            if !(p > 0.0 && p <= 1.0) {
                return bad(format!("p must lie in (0, 1], got {p}"));
            }
        }
        if !(self.delta() > 0.0 && self.delta() < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta()));
        }
        if !(0.0..1.0).contains(&self.discount()) {
            return bad(format!("discount must lie in [0, 1), got {}", self.discount()));
        }
        if self.episode_len() == 0 {
            return bad("episode_len must be positive".into());
        }
        if self.t_c() > horizon && matches!(self.algorithm, Algorithm::Lg12t | Algorithm::Lg1tRl) {
            return bad(format!("t_c {} exceeds the horizon {horizon}", self.t_c()));
        }
        Ok(())
    }

    fn lgkt_config(&self, k: usize, gamma: ThresholdSchedule, horizon: usize) -> LgktConfig {
        let mut config = LgktConfig::new(k, gamma, horizon);
        if let Some(eta) = self.eta {
            config.eta = eta;
        }
        if let Some(p) = self.p {
            config.p = p;
        }
        config.exploration = self.exploration.unwrap_or_default();
        config
    }

    fn lg1t_config(&self, horizon: usize) -> Lg1tConfig {
        Lg1tConfig {
            gamma: self.gamma(),
            exploration: self.exploration.unwrap_or_default(),
            horizon,
        }
    }

    /// Instantiate for an `S × A` environment.
    pub fn build(
        &self,
        num_states: usize,
        num_actions: usize,
        horizon: usize,
        rng: RngStream,
    ) -> Box<dyn Agent> {
        let (ns, na) = (num_states, num_actions);
        match self.algorithm {
            Algorithm::Lg1t => Box::new(Lg1t::new(ns, na, self.lg1t_config(horizon), rng)),
            Algorithm::Lgkt => Box::new(Lgkt::new(
                ns,
                na,
                self.lgkt_config(self.k(), self.gamma(), horizon),
                rng,
            )),
            Algorithm::Lg12t => Box::new(Lg12t::new(
                ns,
                na,
                self.lg1t_config(horizon),
                self.lgkt_config(2, self.gamma_tail(), horizon),
                self.t_c(),
                rng,
            )),
            Algorithm::Lg1tRl => Box::new(Lg1tRl::new(
                Lg1t::new(ns, na, self.lg1t_config(horizon), rng),
                Ucrl2::new(ns, na, Ucrl2Config { delta: self.delta() }),
                ns,
                na,
                self.t_c(),
            )),
            Algorithm::Ucrl2 => Box::new(Ucrl2::new(ns, na, Ucrl2Config { delta: self.delta() })),
            Algorithm::QEpisodic => {
                let mut config = EpisodicQConfig::new(self.episode_len(), horizon);
                config.delta = self.delta();
                Box::new(EpisodicQ::new(ns, na, config))
            }
            Algorithm::OptimisticQ => {
                let mut config = OptimisticQConfig::new(self.discount(), horizon);
                config.delta = self.delta();
                Box::new(OptimisticQ::new(ns, na, config))
            }
            Algorithm::Uniform => Box::new(UniformRandom::new(na, rng)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReference {
    pub k: usize,
    pub gamma: ThresholdSchedule,
}

impl Default for RegretReference {
    fn default() -> Self {
        Self {
            k: 1,
            gamma: 0.3.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedConfig {
    /// Repetitions per instance.
    pub count: usize,
    pub master: u64,
}

impl Default for SeedConfig {
    fn default() -> Self {
        Self {
            count: 1,
            master: 2024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_true")]
    pub optimal: bool,
    /// Depths of greedy lookahead policies to evaluate.
    #[serde(default)]
    pub greedy: Vec<usize>,
    /// Thresholding policies to evaluate.
    #[serde(default)]
    pub thresholding: Vec<RegretReference>,
}

fn default_true() -> bool {
    true
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            optimal: true,
            greedy: vec![1, 2],
            thresholding: Vec::new(),
        }
    }
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON
}

fn default_instances() -> usize {
    1
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

fn default_keep_traces() -> bool {
    true
}

/// One experiment: an environment family, a set of agents and a seed plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub environment: EnvironmentSpec,
    /// Number of instances; only random environments use more than one.
    #[serde(default = "default_instances")]
    pub instances: usize,
    pub agents: Vec<AgentConfig>,
    /// Final decision index `T`.
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default)]
    pub seeds: SeedConfig,
    #[serde(default)]
    pub oracles: OracleConfig,
    /// Regret reference for agents without their own threshold.
    #[serde(default)]
    pub regret: RegretReference,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Worker threads; `None` uses every core.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    /// Write per-step trace files next to the per-run metrics.
    #[serde(default = "default_keep_traces")]
    pub keep_traces: bool,
}

impl ExperimentConfig {
    pub fn new(environment: EnvironmentSpec, agents: Vec<AgentConfig>) -> Self {
        Self {
            name: None,
            environment,
            instances: default_instances(),
            agents,
            horizon: DEFAULT_HORIZON,
            seeds: SeedConfig::default(),
            oracles: OracleConfig::default(),
            regret: RegretReference::default(),
            output: default_output(),
            jobs: None,
            keep_traces: true,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Replace the master seed with `LOOKAHEAD_RL_SEED` if it is set.
    pub fn apply_env_overrides(&mut self) -> Result<()> {
        if let Ok(value) = std::env::var(SEED_ENV_VAR) {
            self.seeds.master = value.trim().parse().map_err(|_| {
                Error::Config(format!("{SEED_ENV_VAR} must be an unsigned integer, got `{value}`"))
            })?;
        }
        Ok(())
    }

    pub fn instance_count(&self) -> usize {
        if self.environment.is_random() {
            self.instances
        } else {
            1
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if self.seeds.count < 1 {
            return Err(Error::Config("seed count must be at least 1".into()));
        }
        if self.instances < 1 {
            return Err(Error::Config("instance count must be at least 1".into()));
        }
        if self.agents.is_empty() {
            return Err(Error::Config("agent list is empty".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        let mut labels = std::collections::BTreeSet::new();
        for agent in &self.agents {
            agent.validate(self.horizon)?;
            if !labels.insert(agent.label()) {
                return Err(Error::Config(format!("duplicate agent label `{}`", agent.label())));
            }
        }
        if self.regret.k < 1 {
            return Err(Error::Config("regret reference needs k >= 1".into()));
        }
        self.regret.gamma.check_covers(self.horizon)?;
        for t in &self.oracles.thresholding {
            t.gamma.check_covers(self.horizon)?;
        }
        if let EnvironmentSpec::Synthetic { params, .. } = &self.environment {
            params.validate()?;
        }
        Ok(())
    }

    /// Seed of instance `i`.
    pub fn instance_seed(&self, instance: usize) -> u64 {
        split_seed(self.seeds.master, instance as u64)
    }

    /// Seed of repetition `rep` on instance `i`; the instance generator uses
    /// child 0 of the instance seed, runs use children `1 + rep`.
    pub fn run_seed(&self, instance: usize, rep: usize) -> u64 {
        split_seed(self.instance_seed(instance), 1 + rep as u64)
    }

    pub fn build_instance(&self, instance: usize) -> Result<TabularMdp> {
        self.environment.build(split_seed(self.instance_seed(instance), 0))
    }

    /// Copies of every thresholding agent, one per threshold; other agents
    /// are kept once.
    pub fn expand_thresholds(&self, gammas: &[f64]) -> ExperimentConfig {
        let mut agents = Vec::new();
        for agent in &self.agents {
            if !agent.algorithm.is_thresholding() {
                agents.push(agent.clone());
                continue;
            }
            let base = agent.label();
            for &g in gammas {
                let mut copy = agent.clone();
                if agent.algorithm == Algorithm::Lg12t {
                    copy.gamma_tail = Some(g.into());
                } else {
                    copy.gamma = Some(g.into());
                }
                copy.label = Some(format!("{base}@{g}"));
                agents.push(copy);
            }
        }
        ExperimentConfig {
            agents,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let config = ExperimentConfig::from_json(
            r#"{"environment": {"kind": "jumpriverswim", "max_index": 4},
                "agents": [{"algorithm": "lg1t"}, {"algorithm": "lgkt", "gamma": 0.8}]}"#,
        )
        .unwrap();
        assert_eq!(config.horizon, 20_000);
        assert_eq!(config.seeds.count, 1);
        assert_eq!(config.agents[1].k(), 2);
        assert_eq!(config.agents[1].gamma(), ThresholdSchedule::Constant(0.8));
        assert_eq!(config.agents[0].label(), "LG1T[g=0.3]");
        config.validate().unwrap();
        let back = ExperimentConfig::from_json(&config.to_json().unwrap()).unwrap();
        assert_eq!(back, config);
    }

    #[test]
    fn rejects_bad_configs() {
        let env = EnvironmentSpec::FrozenLake4x4;
        let mut config = ExperimentConfig::new(env.clone(), vec![AgentConfig::new(Algorithm::Lg1t)]);
        config.seeds.count = 0;
        assert!(config.validate().is_err());
        let config = ExperimentConfig::new(env.clone(), vec![]);
        assert!(config.validate().is_err());
        let mut config = ExperimentConfig::new(env.clone(), vec![AgentConfig::new(Algorithm::Lg1t)]);
        config.horizon = 0;
        assert!(config.validate().is_err());
        let mut agent = AgentConfig::new(Algorithm::Lgkt);
        agent.k = Some(1);
        assert!(ExperimentConfig::new(env.clone(), vec![agent]).validate().is_err());
        let twice = vec![AgentConfig::new(Algorithm::Ucrl2), AgentConfig::new(Algorithm::Ucrl2)];
        assert!(ExperimentConfig::new(env.clone(), twice).validate().is_err());
        let mut agent = AgentConfig::new(Algorithm::Lg1t);
        agent.gamma = Some(ThresholdSchedule::PerStep(vec![0.3; 10]));
        assert!(ExperimentConfig::new(env, vec![agent]).validate().is_err());
        assert!(ExperimentConfig::from_json(r#"{"environment": {"kind": "mars"}, "agents": []}"#).is_err());
        assert!(ExperimentConfig::from_json(
            r#"{"environment": {"kind": "frozenlake4x4"}, "agents": [{"algorithm": "lg1t", "gama": 1}]}"#
        )
        .is_err());
    }

    #[test]
    fn seeds_depend_only_on_master_and_indices() {
        let mut config = ExperimentConfig::new(
            EnvironmentSpec::Synthetic {
                num_states: 3,
                num_actions: 2,
                params: SyntheticMdpParams::small(),
            },
            vec![AgentConfig::new(Algorithm::Lg1t)],
        );
        config.instances = 3;
        let a = config.build_instance(2).unwrap();
        assert_eq!(a, config.build_instance(2).unwrap());
        assert_ne!(a, config.build_instance(1).unwrap());
        assert_ne!(config.run_seed(0, 0), config.run_seed(0, 1));
        assert_ne!(config.run_seed(0, 0), config.run_seed(1, 0));
        config.seeds.master = 7;
        assert_ne!(a, config.build_instance(2).unwrap());
    }

    #[test]
    fn threshold_expansion() {
        let config = ExperimentConfig::new(
            EnvironmentSpec::FrozenLake4x4,
            vec![
                AgentConfig::new(Algorithm::Lg1t),
                AgentConfig::new(Algorithm::Lgkt),
                AgentConfig::new(Algorithm::Ucrl2),
            ],
        );
        let expanded = config.expand_thresholds(&[0.1, 0.3, 0.5, 0.9]);
        assert_eq!(expanded.agents.len(), 9);
        expanded.validate().unwrap();
        assert_eq!(expanded.agents[0].label(), "LG1T[g=0.3]@0.1");
        assert_eq!(expanded.agents[0].gamma(), ThresholdSchedule::Constant(0.1));
    }

    #[test]
    fn every_algorithm_builds() {
        let mdp = jump_riverswim(3);
        for algorithm in [
            Algorithm::Lg1t,
            Algorithm::Lgkt,
            Algorithm::Lg12t,
            Algorithm::Lg1tRl,
            Algorithm::Ucrl2,
            Algorithm::QEpisodic,
            Algorithm::OptimisticQ,
            Algorithm::Uniform,
        ] {
            let mut agent_config = AgentConfig::new(algorithm);
            agent_config.t_c = Some(5);
            let mut agent = agent_config.build(mdp.num_states(), mdp.num_actions(), 50, RngStream::new(1));
            let a = agent.select_action(0, 0);
            assert!(a < mdp.num_actions(), "{algorithm:?}");
        }
    }
}
