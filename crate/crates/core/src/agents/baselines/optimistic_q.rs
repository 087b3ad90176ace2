use serde::{Deserialize, Serialize};

use super::greedy;
use crate::agents::{Agent, Transition};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimisticQConfig {
    /// Discount factor in `[0, 1)`.
    pub discount: f64,
    /// Span bound used in the bonus.
    #[serde(default = "default_span")]
    pub span: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Final decision index `T`.
    pub horizon: usize,
}

fn default_span() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    0.05
}

impl OptimisticQConfig {
    pub fn new(discount: f64, horizon: usize) -> Self {
        Self {
            discount,
            span: default_span(),
            delta: default_delta(),
            horizon,
        }
    }
}

/// Optimistic discounted Q-learning.
///
/// `H = 1 / (1 − γ)`, learning rate `(H + 1) / (H + τ)` and bonus
/// `4 sp sqrt(H ι / τ)` with `ι = ln(2 T / δ)`. The played table `Q̂` only
/// ever decreases from its initial value `H`.
#[derive(Debug, Clone)]
pub struct OptimisticQ {
    num_actions: usize,
    discount: f64,
    h: f64,
    bonus_scale: f64,
    iota: f64,
    q: Vec<f64>,
    q_hat: Vec<f64>,
    v_hat: Vec<f64>,
    n: Vec<u64>,
    steps: usize,
}

impl OptimisticQ {
    pub fn new(num_states: usize, num_actions: usize, config: OptimisticQConfig) -> Self {
        assert!(
            (0.0..1.0).contains(&config.discount),
            "discount must lie in [0, 1)"
        );
        let h = 1.0 / (1.0 - config.discount);
        let len = num_states * num_actions;
        let iota = (2.0 * (config.horizon + 1) as f64 / config.delta).ln();
        Self {
            num_actions,
            discount: config.discount,
            h,
            bonus_scale: 4.0 * config.span,
            iota,
            q: vec![h; len],
            q_hat: vec![h; len],
            v_hat: vec![h; num_states],
            n: vec![0; len],
            steps: 0,
        }
    }

    fn row(&self, s: usize) -> &[f64] {
        &self.q_hat[s * self.num_actions..(s + 1) * self.num_actions]
    }

    pub fn q_hat(&self, s: usize, a: usize) -> f64 {
        self.row(s)[a]
    }

    pub fn optimism_bound(&self) -> f64 {
        self.h
    }
}

impl Agent for OptimisticQ {
    fn select_action(&mut self, state: usize, _t: usize) -> usize {
        greedy(self.row(state))
    }

    fn observe(&mut self, tr: &Transition) {
        self.steps += 1;
        let idx = tr.state * self.num_actions + tr.action;
        self.n[idx] += 1;
        let tau = self.n[idx] as f64;
        let alpha = (self.h + 1.0) / (self.h + tau);
        let bonus = self.bonus_scale * (self.h * self.iota / tau).sqrt();
        let target = tr.reward + self.discount * self.v_hat[tr.next_state] + bonus;
        self.q[idx] = (1.0 - alpha) * self.q[idx] + alpha * target;
        self.q_hat[idx] = self.q_hat[idx].min(self.q[idx]);
        self.v_hat[tr.state] = self.row(tr.state).iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    }

    fn steps_consumed(&self) -> usize {
        self.steps
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn play(agent: &mut OptimisticQ, rewards: &[f64], steps: usize) -> Vec<usize> {
        (0..steps)
            .map(|t| {
                let a = agent.select_action(0, t);
                agent.observe(&Transition { t, state: 0, action: a, reward: rewards[a], next_state: 0 });
                a
            })
            .collect()
    }

    #[test]
    fn finds_the_better_arm() {
        for discount in [0.0, 0.9, 0.99] {
            let mut agent = OptimisticQ::new(1, 2, OptimisticQConfig::new(discount, 20_000));
            let actions = play(&mut agent, &[1.0, 0.0], 20_001);
            let late = &actions[1000..];
            let share = late.iter().filter(|&&a| a == 0).count() as f64 / late.len() as f64;
            assert!(share >= 0.99, "discount {discount}: {share}");
        }
    }

    #[test]
    fn played_values_never_exceed_initial_optimism() {
        let mut agent = OptimisticQ::new(1, 3, OptimisticQConfig::new(0.9, 3000));
        play(&mut agent, &[0.2, 0.9, 0.4], 3001);
        for a in 0..3 {
            assert!(agent.q_hat(0, a) <= agent.optimism_bound());
        }
    }
}
