//! Tabular MDP data model, validation and sampling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Row-sum tolerance used by [`validate_mdp`].
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RewardNoise {
    Deterministic,
    Gaussian { variance: f64 },
}

impl RewardNoise {
    pub fn variance(&self) -> f64 {
        match self {
            RewardNoise::Deterministic => 0.0,
            RewardNoise::Gaussian { variance } => *variance,
        }
    }
}

/// A finite MDP `(S, A, P_a, R)` with a reward-noise model.
///
/// Transitions are stored flat, indexed `[action][state][next_state]`; mean
/// rewards are indexed `[state][action]`. The value is immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MdpFile", into = "MdpFile")]
pub struct TabularMdp {
    num_states: usize,
    num_actions: usize,
    transitions: Vec<f64>,
    mean_rewards: Vec<f64>,
    noise: RewardNoise,
}

/// On-disk shape: nested arrays, `transitions` is A×S×S, `mean_rewards` S×A.
#[derive(Serialize, Deserialize)]
struct MdpFile {
    num_states: usize,
    num_actions: usize,
    transitions: Vec<Vec<Vec<f64>>>,
    mean_rewards: Vec<Vec<f64>>,
    noise: RewardNoise,
}

impl TryFrom<MdpFile> for TabularMdp {
    type Error = Error;

    fn try_from(f: MdpFile) -> Result<Self> {
        let mdp = TabularMdp::new(f.transitions, f.mean_rewards, f.noise)?;
        if mdp.num_states != f.num_states || mdp.num_actions != f.num_actions {
            return Err(Error::MalformedMdp(format!(
                "declared {}x{} but arrays are {}x{}",
                f.num_states, f.num_actions, mdp.num_states, mdp.num_actions
            )));
        }
        Ok(mdp)
    }
}

impl From<TabularMdp> for MdpFile {
    fn from(m: TabularMdp) -> Self {
        let (s, a) = (m.num_states, m.num_actions);
        MdpFile {
            num_states: s,
            num_actions: a,
            transitions: (0..a)
                .map(|act| (0..s).map(|st| m.transition_row(st, act).to_vec()).collect())
                .collect(),
            mean_rewards: (0..s).map(|st| m.reward_row(st).to_vec()).collect(),
            noise: m.noise,
        }
    }
}

impl TabularMdp {
    /// Build from nested `[action][state][next_state]` transitions and
    /// `[state][action]` mean rewards. Only shapes are checked here; numeric
    /// problems are reported by [`validate_mdp`].
    pub fn new(
        transitions: Vec<Vec<Vec<f64>>>,
        mean_rewards: Vec<Vec<f64>>,
        noise: RewardNoise,
    ) -> Result<Self> {
        let num_actions = transitions.len();
        let num_states = mean_rewards.len();
        if num_actions == 0 || num_states == 0 {
            return Err(Error::MalformedMdp("need at least one state and one action".into()));
        }
        let mut flat = Vec::with_capacity(num_actions * num_states * num_states);
        for (a, block) in transitions.iter().enumerate() {
            if block.len() != num_states {
                return Err(Error::MalformedMdp(format!(
                    "action {a} has {} rows, expected {num_states}",
                    block.len()
                )));
            }
            for (s, row) in block.iter().enumerate() {
                if row.len() != num_states {
                    return Err(Error::MalformedMdp(format!(
                        "row (a={a}, s={s}) has {} entries, expected {num_states}",
                        row.len()
                    )));
                }
                flat.extend_from_slice(row);
            }
        }
        let mut rewards = Vec::with_capacity(num_states * num_actions);
        for (s, row) in mean_rewards.iter().enumerate() {
            if row.len() != num_actions {
                return Err(Error::MalformedMdp(format!(
                    "reward row {s} has {} entries, expected {num_actions}",
                    row.len()
                )));
            }
            rewards.extend_from_slice(row);
        }
        if noise.variance() < 0.0 || !noise.variance().is_finite() {
            return Err(Error::MalformedMdp(format!(
                "noise variance {} must be finite and nonnegative",
                noise.variance()
            )));
        }
        Ok(Self {
            num_states,
            num_actions,
            transitions: flat,
            mean_rewards: rewards,
            noise,
        })
    }

    /// Build from a transition function `p(a, s, s')` and reward function `r(s, a)`.
    pub fn from_fn(
        num_states: usize,
        num_actions: usize,
        p: impl Fn(usize, usize, usize) -> f64,
        r: impl Fn(usize, usize) -> f64,
        noise: RewardNoise,
    ) -> Result<Self> {
        let transitions = (0..num_actions)
            .map(|a| {
                (0..num_states)
                    .map(|s| (0..num_states).map(|n| p(a, s, n)).collect())
                    .collect()
            })
            .collect();
        let rewards = (0..num_states)
            .map(|s| (0..num_actions).map(|a| r(s, a)).collect())
            .collect();
        Self::new(transitions, rewards, noise)
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn noise(&self) -> RewardNoise {
        self.noise
    }

    pub fn with_noise(mut self, noise: RewardNoise) -> Self {
        self.noise = noise;
        self
    }

    /// `P_a(s, ·)`.
    pub fn transition_row(&self, state: usize, action: usize) -> &[f64] {
        let start = (action * self.num_states + state) * self.num_states;
        &self.transitions[start..start + self.num_states]
    }

    pub fn transition(&self, action: usize, state: usize, next: usize) -> f64 {
        self.transition_row(state, action)[next]
    }

    /// `R_{s,·}`.
    pub fn reward_row(&self, state: usize) -> &[f64] {
        let start = state * self.num_actions;
        &self.mean_rewards[start..start + self.num_actions]
    }

    pub fn mean_reward(&self, state: usize, action: usize) -> f64 {
        self.mean_rewards[state * self.num_actions + action]
    }

    pub fn max_abs_reward(&self) -> f64 {
        self.mean_rewards.iter().fold(0.0_f64, |m, r| m.max(r.abs()))
    }

    fn check_indices(&self, state: usize, action: usize) {
        assert!(
            state < self.num_states,
            "state {state} out of range for {} states",
            self.num_states
        );
        assert!(
            action < self.num_actions,
            "action {action} out of range for {} actions",
            self.num_actions
        );
    }

    /// Successor for a given uniform draw `u ∈ [0, 1)`: the lowest index `s'`
    /// with positive mass whose cumulative probability reaches `u`.
    ///
    /// # Panics
    /// If `state` or `action` is out of range.
    pub fn successor_for_draw(&self, state: usize, action: usize, u: f64) -> usize {
        self.check_indices(state, action);
        let row = self.transition_row(state, action);
        let mut cumulative = 0.0;
        let mut last_positive = 0;
        for (next, &p) in row.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            cumulative += p;
            last_positive = next;
            if u <= cumulative {
                return next;
            }
        }
        // Round-off left the cumulative sum just below u.
        last_positive
    }

    /// Draw `s' ~ P_a(s, ·)` by inverse CDF, consuming one uniform draw.
    ///
    /// # Panics
    /// If `state` or `action` is out of range.
    pub fn sample_transition(&self, state: usize, action: usize, rng: &mut RngStream) -> usize {
        let u = rng.uniform();
        self.successor_for_draw(state, action, u)
    }

    /// Draw a reward with mean `R_{s,a}`. Deterministic noise consumes no
    /// draws; Gaussian noise consumes exactly two.
    pub fn sample_reward(&self, state: usize, action: usize, rng: &mut RngStream) -> f64 {
        self.check_indices(state, action);
        let mean = self.mean_reward(state, action);
        match self.noise {
            RewardNoise::Deterministic => mean,
            RewardNoise::Gaussian { variance } => mean + variance.sqrt() * rng.standard_normal(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Row `P_a(s, ·)` does not sum to one.
    RowSum { action: usize, state: usize, sum: f64 },
    /// Row `P_a(s, ·)` has a negative or non-finite entry.
    BadProbability { action: usize, state: usize, next: usize, value: f64 },
    NonFiniteReward { state: usize, action: usize, value: f64 },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Report every malformed transition row and non-finite reward. Never fails.
pub fn validate_mdp(mdp: &TabularMdp) -> ValidationReport {
    let mut violations = Vec::new();
    for action in 0..mdp.num_actions() {
        for state in 0..mdp.num_states() {
            let row = mdp.transition_row(state, action);
            for (next, &value) in row.iter().enumerate() {
                if !(value >= 0.0 && value.is_finite()) {
                    violations.push(Violation::BadProbability { action, state, next, value });
                }
            }
            let sum: f64 = row.iter().sum();
            if !((sum - 1.0).abs() <= ROW_SUM_TOLERANCE) {
                violations.push(Violation::RowSum { action, state, sum });
            }
        }
    }
    for state in 0..mdp.num_states() {
        for action in 0..mdp.num_actions() {
            let value = mdp.mean_reward(state, action);
            if !value.is_finite() {
                violations.push(Violation::NonFiniteReward { state, action, value });
            }
        }
    }
    ValidationReport { violations }
}
