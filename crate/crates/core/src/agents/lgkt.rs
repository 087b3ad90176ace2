use serde::{Deserialize, Serialize};

use super::lcb::{select_thresholded, LcbState};
use super::sub_alg::SubAlgUcb;
use super::{Agent, ExplorationMode, Phase, ThresholdSchedule, Transition};
use crate::rng::RngStream;

fn default_eta() -> f64 {
    0.5
}

fn default_p() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LgktConfig {
    /// Lookahead depth, at least 2.
    pub k: usize,
    pub gamma: ThresholdSchedule,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub exploration: ExplorationMode,
    /// Final decision index `T`.
    pub horizon: usize,
}

impl LgktConfig {
    pub fn new(k: usize, gamma: impl Into<ThresholdSchedule>, horizon: usize) -> Self {
        Self {
            k,
            gamma: gamma.into(),
            eta: default_eta(),
            p: default_p(),
            exploration: ExplorationMode::default(),
            horizon,
        }
    }
}

/// `ε = min{1, 1 / ((N + 1)^p · min{η, 1/2})}`.
pub fn exploration_probability(n_prev: u64, eta: f64, p: f64) -> f64 {
    let denom = ((n_prev + 1) as f64).powf(p) * eta.min(0.5);
    (1.0 / denom).min(1.0)
}

/// An estimation rollout in progress.
#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    /// The pair whose continuation return is being sampled. `None` for a
    /// rollout started before any step was taken.
    pub reference: Option<(usize, usize)>,
    steps: Vec<(usize, usize, f64)>,
}

impl Rollout {
    pub fn new(reference: Option<(usize, usize)>) -> Self {
        Self {
            reference,
            steps: Vec::new(),
        }
    }

    /// Steps taken so far.
    pub fn stage(&self) -> usize {
        self.steps.len()
    }

    pub fn total(&self) -> f64 {
        self.steps.iter().map(|&(_, _, r)| r).sum()
    }
}

/// Runs the `(K−1)`-step sampling rollouts.
///
/// Actions come from a [`SubAlgUcb`] keyed by `(reference pair, state,
/// stage)`. When a rollout completes, each stage's arm is credited with the
/// reward-to-go from that stage and the summed return is folded into the
/// reference pair's continuation statistics.
#[derive(Debug, Clone)]
pub struct ContinuationEstimator {
    sub_alg: SubAlgUcb,
    num_states: usize,
    num_actions: usize,
    k: usize,
}

impl ContinuationEstimator {
    pub fn new(num_states: usize, num_actions: usize, k: usize) -> Self {
        assert!(k >= 2, "continuation rollouts need K >= 2");
        Self {
            sub_alg: SubAlgUcb::new(num_actions),
            num_states,
            num_actions,
            k,
        }
    }

    fn key(&self, reference: Option<(usize, usize)>, state: usize, stage: usize) -> (usize, usize, usize) {
        let r = match reference {
            Some((s, a)) => s * self.num_actions + a,
            None => self.num_states * self.num_actions,
        };
        (r, state, stage)
    }

    pub fn choose(&self, rollout: &Rollout, state: usize) -> usize {
        self.sub_alg
            .select(self.key(rollout.reference, state, rollout.stage()))
    }

    /// Record one rollout step. Returns `true` when the rollout has its
    /// `K − 1` steps.
    pub fn record(
        &mut self,
        rollout: &mut Rollout,
        state: usize,
        action: usize,
        reward: f64,
        stats: &mut LcbState,
    ) -> bool {
        stats.record_reward(state, action, reward);
        rollout.steps.push((state, action, reward));
        if rollout.stage() < self.k - 1 {
            return false;
        }
        let mut to_go = 0.0;
        for (stage, &(s, a, r)) in rollout.steps.iter().enumerate().rev() {
            to_go += r;
            let key = self.key(rollout.reference, s, stage);
            self.sub_alg.update(key, a, to_go);
        }
        if let Some((s, a)) = rollout.reference {
            stats.record_continuation(s, a, to_go);
        }
        true
    }

    pub fn sub_alg(&self) -> &SubAlgUcb {
        &self.sub_alg
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepAccounting {
    pub exploit_steps: usize,
    pub explorations_started: usize,
    pub completed_explorations: usize,
    /// Steps of a rollout cut off by the end of the horizon.
    pub truncated_steps: usize,
}

/// K-step LCB-guided thresholding with ε-greedy continuation sampling.
///
/// At each decision point the thresholding action is chosen first, then a
/// coin with probability ε (from the visit count of the previous step's pair)
/// decides whether to discard it and start a `K − 1` step rollout instead.
#[derive(Debug, Clone)]
pub struct Lgkt {
    config: LgktConfig,
    stats: LcbState,
    estimator: ContinuationEstimator,
    rng: RngStream,
    prev: Option<(usize, usize)>,
    rollout: Option<Rollout>,
    phase: Phase,
    steps: usize,
    accounting: StepAccounting,
}

impl Lgkt {
    pub fn new(num_states: usize, num_actions: usize, config: LgktConfig, rng: RngStream) -> Self {
        let stats = LcbState::new(num_states, num_actions, config.k);
        Self::warm_start(config, stats, None, rng)
    }

    /// Start from existing statistics, e.g. one-step counts gathered by
    /// another learner. `prev` is the last pair played before the hand-over.
    pub fn warm_start(
        config: LgktConfig,
        stats: LcbState,
        prev: Option<(usize, usize)>,
        rng: RngStream,
    ) -> Self {
        assert!(config.k >= 2, "LGKT needs K >= 2");
        assert_eq!(stats.k(), config.k, "statistics depth must match K");
        let estimator = ContinuationEstimator::new(stats.num_states(), stats.num_actions(), config.k);
        Self {
            config,
            stats,
            estimator,
            rng,
            prev,
            rollout: None,
            phase: Phase::Exploit,
            steps: 0,
            accounting: StepAccounting::default(),
        }
    }

    pub fn stats(&self) -> &LcbState {
        &self.stats
    }

    pub fn accounting(&self) -> StepAccounting {
        self.accounting
    }

    pub fn in_rollout(&self) -> bool {
        self.rollout.is_some()
    }
}

impl Agent for Lgkt {
    fn select_action(&mut self, state: usize, t: usize) -> usize {
        if let Some(rollout) = &self.rollout {
            self.phase = Phase::Subroutine;
            return self.estimator.choose(rollout, state);
        }
        let tentative = select_thresholded(
            &self.stats,
            state,
            self.config.gamma.at(t),
            self.config.exploration,
            self.config.horizon,
            &mut self.rng,
        );
        let epsilon = match self.prev {
            None => 1.0,
            Some((s, a)) => exploration_probability(self.stats.count(s, a), self.config.eta, self.config.p),
        };
        if self.rng.uniform() < epsilon {
            let rollout = Rollout::new(self.prev);
            let action = self.estimator.choose(&rollout, state);
            self.rollout = Some(rollout);
            self.accounting.explorations_started += 1;
            self.phase = Phase::Explore;
            action
        } else {
            self.phase = Phase::Exploit;
            tentative.action
        }
    }

    fn observe(&mut self, tr: &Transition) {
        self.steps += 1;
        self.prev = Some((tr.state, tr.action));
        match self.rollout.as_mut() {
            Some(rollout) => {
                let done = self
                    .estimator
                    .record(rollout, tr.state, tr.action, tr.reward, &mut self.stats);
                if done {
                    self.accounting.completed_explorations += 1;
                    self.rollout = None;
                } else if tr.t >= self.config.horizon {
                    self.accounting.truncated_steps += rollout.stage();
                    self.rollout = None;
                }
            }
            None => {
                self.stats.record_reward(tr.state, tr.action, tr.reward);
                self.accounting.exploit_steps += 1;
            }
        }
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
    use crate::planning::k_step_rewards;
    use approx::assert_abs_diff_eq;

    #[test]
    fn epsilon_values() {
        assert_abs_diff_eq!(exploration_probability(8, 0.4, 0.5), 1.0 / 1.2, epsilon = 1e-12);
        assert_eq!(exploration_probability(0, 0.5, 0.5), 1.0);
        assert_eq!(exploration_probability(0, 0.9, 1.0), 1.0);
        assert_eq!(exploration_probability(3, 2.0, 0.5), 1.0);
        assert!(exploration_probability(100, 0.5, 0.5) < exploration_probability(99, 0.5, 0.5));
    }

    fn run(mdp: &TabularMdp, agent: &mut Lgkt, horizon: usize, seed: u64) -> Vec<(usize, Phase)> {
        let mut env = RngStream::new(seed);
        let mut s = 0;
        (0..=horizon)
            .map(|t| {
                let a = agent.select_action(s, t);
                let r = mdp.sample_reward(s, a, &mut env);
                let next = mdp.sample_transition(s, a, &mut env);
                agent.observe(&Transition { t, state: s, action: a, reward: r, next_state: next });
                s = next;
                (a, agent.phase())
            })
            .collect()
    }

    fn chain() -> TabularMdp {
        TabularMdp::from_fn(
            3,
            2,
            |a, s, n| if (a == 0 && n == s) || (a == 1 && n == (s + 1) % 3) { 1.0 } else { 0.0 },
            |s, a| [[0.2, 0.5], [0.9, 0.1], [0.4, 0.3]][s][a],
            RewardNoise::Gaussian { variance: 0.1 },
        )
        .unwrap()
    }

    #[test]
    fn first_decision_explores() {
        let mut agent = Lgkt::new(3, 2, LgktConfig::new(2, 0.9, 100), RngStream::new(4));
        agent.select_action(0, 0);
        assert_eq!(agent.phase(), Phase::Explore);
        assert!(agent.in_rollout());
    }

    #[test]
    fn step_accounting_adds_up() {
        let mdp = chain();
        for k in 2..=4 {
            for (seed, horizon) in [(1, 0), (2, 1), (3, 57), (4, 500), (5, 1999)] {
                let mut agent = Lgkt::new(3, 2, LgktConfig::new(k, 0.9, horizon), RngStream::new(seed));
                let trace = run(&mdp, &mut agent, horizon, seed + 100);
                let acc = agent.accounting();
                assert_eq!(
                    acc.exploit_steps + (k - 1) * acc.completed_explorations + acc.truncated_steps,
                    horizon + 1,
                    "k={k} T={horizon}"
                );
                assert_eq!(agent.steps_consumed(), horizon + 1);
                assert!(acc.truncated_steps < k - 1);
                let subroutine = trace.iter().filter(|x| x.1 == Phase::Subroutine).count();
                let explore = trace.iter().filter(|x| x.1 == Phase::Explore).count();
                assert_eq!(explore, acc.explorations_started);
                assert_eq!(explore + subroutine, horizon + 1 - acc.exploit_steps);
            }
        }
    }

    #[test]
    fn rollout_sums_deterministic_rewards() {
        let mut stats = LcbState::new(3, 1, 3);
        let mut est = ContinuationEstimator::new(3, 1, 3);
        let mut rollout = Rollout::new(Some((0, 0)));
        assert!(!est.record(&mut rollout, 1, 0, 0.2, &mut stats));
        assert_eq!(stats.continuation_count(0, 0), 0);
        assert!(est.record(&mut rollout, 2, 0, 0.3, &mut stats));
        assert_abs_diff_eq!(stats.continuation_sum(0, 0), 0.5, epsilon = 1e-15);
        assert_eq!(stats.continuation_count(0, 0), 1);
        assert_eq!(stats.count(1, 0), 1);
        assert_eq!(stats.count(2, 0), 1);
        assert_eq!(stats.count(0, 0), 0);
    }

    #[test]
    fn two_step_rollout_takes_one_action() {
        let mut stats = LcbState::new(2, 2, 2);
        let mut est = ContinuationEstimator::new(2, 2, 2);
        let mut rollout = Rollout::new(Some((0, 1)));
        let a = est.choose(&rollout, 1);
        assert!(est.record(&mut rollout, 1, a, 0.7, &mut stats));
        assert_eq!(stats.continuation_count(0, 1), 1);
        assert_abs_diff_eq!(stats.continuation_sum(0, 1), 0.7);
    }

    #[test]
    fn continuation_mean_matches_planner() {
        // From state 0 under action 0 the next state is 1 or 2; both are
        // two-armed bandits with different best arms.
        let mdp = TabularMdp::from_fn(
            3,
            2,
            |a, s, n| match (s, a) {
                (0, 0) => [0.0, 0.3, 0.7][n],
                _ => [1.0, 0.0, 0.0][n],
            },
            |s, a| [[0.0, 0.0], [0.8, 0.2], [0.1, 0.6]][s][a],
            RewardNoise::Gaussian { variance: 0.04 },
        )
        .unwrap();
        let r1 = k_step_rewards(&mdp, 1);
        let target: f64 = (0..3)
            .map(|n| mdp.transition(0, 0, n) * r1.row(1, n).iter().cloned().fold(f64::MIN, f64::max))
            .sum();
        let mut env = RngStream::new(77);
        let mut stats = LcbState::new(3, 2, 2);
        let mut est = ContinuationEstimator::new(3, 2, 2);
        for _ in 0..10_000 {
            let s = mdp.sample_transition(0, 0, &mut env);
            let mut rollout = Rollout::new(Some((0, 0)));
            let a = est.choose(&rollout, s);
            let r = mdp.sample_reward(s, a, &mut env);
            assert!(est.record(&mut rollout, s, a, r, &mut stats));
        }
        let mean = stats.continuation_sum(0, 0) / stats.continuation_count(0, 0) as f64;
        assert_abs_diff_eq!(mean, target, epsilon = 0.02);
    }

    #[test]
    fn reproducible() {
        let mdp = chain();
        let mut a = Lgkt::new(3, 2, LgktConfig::new(3, 0.9, 800), RngStream::new(9));
        let mut b = Lgkt::new(3, 2, LgktConfig::new(3, 0.9, 800), RngStream::new(9));
        assert_eq!(run(&mdp, &mut a, 800, 1), run(&mdp, &mut b, 800, 1));
    }
}
