use serde::{Deserialize, Serialize};

use super::greedy;
use crate::agents::{Agent, Transition};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodicQConfig {
    /// Pseudo-episode length `H`.
    pub episode_len: usize,
    /// Bonus scale `c`.
    #[serde(default = "default_bonus")]
    pub bonus_scale: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Final decision index `T`.
    pub horizon: usize,
}

fn default_bonus() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    0.05
}

impl EpisodicQConfig {
    pub fn new(episode_len: usize, horizon: usize) -> Self {
        Self {
            episode_len,
            bonus_scale: default_bonus(),
            delta: default_delta(),
            horizon,
        }
    }
}

/// Q-learning with Hoeffding bonuses for finite-horizon episodes.
///
/// The continuing run is cut into consecutive blocks of length `H`; step `t`
/// uses stage `t mod H`. Learning rate `(H + 1) / (H + n)`, bonus
/// `c sqrt(H³ ι / n)` with `ι = ln(S A (T + 1) / δ)`.
#[derive(Debug, Clone)]
pub struct EpisodicQ {
    h: usize,
    num_states: usize,
    num_actions: usize,
    bonus_scale: f64,
    iota: f64,
    q: Vec<f64>,
    v: Vec<f64>,
    n: Vec<u64>,
    steps: usize,
}

impl EpisodicQ {
    pub fn new(num_states: usize, num_actions: usize, config: EpisodicQConfig) -> Self {
        assert!(config.episode_len >= 1, "episode length must be positive");
        let h = config.episode_len;
        let len = h * num_states * num_actions;
        let iota = ((num_states * num_actions * (config.horizon + 1)) as f64 / config.delta).ln();
        Self {
            h,
            num_states,
            num_actions,
            bonus_scale: config.bonus_scale,
            iota,
            q: vec![h as f64; len],
            v: vec![h as f64; h * num_states],
            n: vec![0; len],
            steps: 0,
        }
    }

    fn q_row(&self, stage: usize, s: usize) -> &[f64] {
        let start = (stage * self.num_states + s) * self.num_actions;
        &self.q[start..start + self.num_actions]
    }

    pub fn q(&self, stage: usize, s: usize, a: usize) -> f64 {
        self.q_row(stage, s)[a]
    }

    /// Largest value a Q entry can reach: `H + r_max + c sqrt(H³ ι)`.
    pub fn q_bound(&self, r_max: f64) -> f64 {
        let h = self.h as f64;
        h + r_max + self.bonus_scale * (h.powi(3) * self.iota).sqrt()
    }
}

impl Agent for EpisodicQ {
    fn select_action(&mut self, state: usize, t: usize) -> usize {
        greedy(self.q_row(t % self.h, state))
    }

    fn observe(&mut self, tr: &Transition) {
        self.steps += 1;
        let stage = tr.t % self.h;
        let h = self.h as f64;
        let idx = (stage * self.num_states + tr.state) * self.num_actions + tr.action;
        self.n[idx] += 1;
        let n = self.n[idx] as f64;
        let alpha = (h + 1.0) / (h + n);
        let bonus = self.bonus_scale * (h.powi(3) * self.iota / n).sqrt();
        let next_v = if stage + 1 < self.h {
            self.v[(stage + 1) * self.num_states + tr.next_state]
        } else {
            0.0
        };
        self.q[idx] = (1.0 - alpha) * self.q[idx] + alpha * (tr.reward + next_v + bonus);
        let best = self.q_row(stage, tr.state).iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        self.v[stage * self.num_states + tr.state] = best.min(h);
    }

    fn steps_consumed(&self) -> usize {
        self.steps
    }
}
