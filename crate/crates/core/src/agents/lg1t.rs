use serde::{Deserialize, Serialize};

use super::lcb::{select_thresholded, LcbState};
use super::{Agent, ExplorationMode, Phase, ThresholdSchedule, Transition};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lg1tConfig {
    pub gamma: ThresholdSchedule,
    pub exploration: ExplorationMode,
    /// Final decision index `T`.
    pub horizon: usize,
}

/// One-step LCB-guided thresholding.
#[derive(Debug, Clone)]
pub struct Lg1t {
    config: Lg1tConfig,
    stats: LcbState,
    rng: RngStream,
    phase: Phase,
    steps: usize,
}

impl Lg1t {
    pub fn new(num_states: usize, num_actions: usize, config: Lg1tConfig, rng: RngStream) -> Self {
        Self {
            config,
            stats: LcbState::new(num_states, num_actions, 1),
            rng,
            phase: Phase::Exploit,
            steps: 0,
        }
    }

    pub fn stats(&self) -> &LcbState {
        &self.stats
    }

    pub fn into_parts(self) -> (LcbState, RngStream) {
        (self.stats, self.rng)
    }
}

impl Agent for Lg1t {
    fn select_action(&mut self, state: usize, t: usize) -> usize {
        let sel = select_thresholded(
            &self.stats,
            state,
            self.config.gamma.at(t),
            self.config.exploration,
            self.config.horizon,
            &mut self.rng,
        );
        self.phase = if sel.certified { Phase::Exploit } else { Phase::Explore };
        sel.action
    }

    fn observe(&mut self, tr: &Transition) {
        self.stats.record_reward(tr.state, tr.action, tr.reward);
        self.steps += 1;
    }

    fn phase(&self) -> Phase {
        self.phase
    }

    fn steps_consumed(&self) -> usize {
        self.steps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{RewardNoise, TabularMdp};

    fn bandit(means: &[f64]) -> TabularMdp {
        TabularMdp::from_fn(
            1,
            means.len(),
            |_, _, _| 1.0,
            |_, a| means[a],
            RewardNoise::Gaussian { variance: 0.25 },
        )
        .unwrap()
    }

    fn run(mdp: &TabularMdp, agent: &mut Lg1t, steps: usize, seed: u64) -> Vec<usize> {
        let mut env = RngStream::new(seed);
        let mut s = 0;
        (0..steps)
            .map(|t| {
                let a = agent.select_action(s, t);
                let r = mdp.sample_reward(s, a, &mut env);
                let next = mdp.sample_transition(s, a, &mut env);
                agent.observe(&Transition { t, state: s, action: a, reward: r, next_state: next });
                s = next;
                a
            })
            .collect()
    }

    #[test]
    fn settles_on_the_above_threshold_arm() {
        let mdp = bandit(&[0.1, 0.8, 0.2]);
        let config = Lg1tConfig {
            gamma: 0.5.into(),
            exploration: ExplorationMode::Uniform,
            horizon: 5000,
        };
        let mut agent = Lg1t::new(1, 3, config, RngStream::new(1));
        let actions = run(&mdp, &mut agent, 5000, 2);
        let late = &actions[4000..];
        assert!(late.iter().filter(|&&a| a == 1).count() > 990);
        assert_eq!(agent.steps_consumed(), 5000);
        assert_eq!(agent.phase(), Phase::Exploit);
    }

    #[test]
    fn same_seed_same_actions() {
        let mdp = bandit(&[0.1, 0.8, 0.2]);
        let config = Lg1tConfig {
            gamma: 0.5.into(),
            exploration: ExplorationMode::Uniform,
            horizon: 500,
        };
        let mut a = Lg1t::new(1, 3, config.clone(), RngStream::new(7));
        let mut b = Lg1t::new(1, 3, config, RngStream::new(7));
        assert_eq!(run(&mdp, &mut a, 500, 3), run(&mdp, &mut b, 500, 3));
    }
}
