use serde::{Deserialize, Serialize};

use crate::agents::{Agent, Transition, TransitionCounts};

/// Span tolerance for extended value iteration.
pub const EVI_TOLERANCE: f64 = 1e-4;
/// Sweep cap for extended value iteration.
pub const EVI_MAX_ITERATIONS: usize = 10_000;
/// Self-loop mixing used to keep value iteration aperiodic. It rescales the
/// gain of every policy by the same factor and leaves the ranking unchanged.
const APERIODICITY: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ucrl2Config {
    pub delta: f64,
}

impl Default for Ucrl2Config {
    fn default() -> Self {
        Self { delta: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EviOutcome {
    pub policy: Vec<usize>,
    pub values: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Extended value iteration over an L1 ball around `p_hat`.
///
/// `reward[s * A + a]` is the optimistic reward, `p_hat` is laid out
/// `[(s * A + a) * S + s']` and `radius[s * A + a]` is the L1 radius.
pub fn extended_value_iteration(
    num_states: usize,
    num_actions: usize,
    reward: &[f64],
    p_hat: &[f64],
    radius: &[f64],
) -> EviOutcome {
    let ns = num_states;
    let na = num_actions;
    let mut u: Vec<f64> = vec![0.0; ns];
    let mut next = vec![0.0; ns];
    let mut policy = vec![0; ns];
    let mut order: Vec<usize> = (0..ns).collect();
    let mut p = vec![0.0; ns];
    for iteration in 1..=EVI_MAX_ITERATIONS {
        // Highest value first, lowest index among equals.
        order.sort_by(|&x, &y| u[y].total_cmp(&u[x]).then(x.cmp(&y)));
        for s in 0..ns {
            let mut best = f64::NEG_INFINITY;
            let mut best_a = 0;
            for a in 0..na {
                let idx = s * na + a;
                optimistic_distribution(&p_hat[idx * ns..(idx + 1) * ns], radius[idx], &order, &mut p);
                let expected: f64 = p.iter().zip(&u).map(|(pi, ui)| pi * ui).sum();
                let value = APERIODICITY * (reward[idx] + expected) + (1.0 - APERIODICITY) * u[s];
                if value > best {
                    best = value;
                    best_a = a;
                }
            }
            next[s] = best;
            policy[s] = best_a;
        }
        let (lo, hi) = next
            .iter()
            .zip(&u)
            .map(|(a, b)| a - b)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)));
        let shift = next[0];
        for (ui, ni) in u.iter_mut().zip(&next) {
            *ui = ni - shift;
        }
        if hi - lo < EVI_TOLERANCE {
            return EviOutcome {
                policy,
                values: u,
                iterations: iteration,
                converged: true,
            };
        }
    }
    EviOutcome {
        policy,
        values: u,
        iterations: EVI_MAX_ITERATIONS,
        converged: false,
    }
}

/// Most optimistic distribution within L1 distance `radius` of `p_hat`:
/// move up to `radius / 2` onto the best state, taking mass from the worst.
fn optimistic_distribution(p_hat: &[f64], radius: f64, order: &[usize], p: &mut [f64]) {
    p.copy_from_slice(p_hat);
    let best = order[0];
    p[best] = (p_hat[best] + radius / 2.0).min(1.0);
    let mut total: f64 = p.iter().sum();
    for &s in order.iter().rev() {
        if total <= 1.0 {
            break;
        }
        if s == best {
            continue;
        }
        let cut = p[s].min(total - 1.0);
        p[s] -= cut;
        total -= cut;
    }
}

/// UCRL2 with count-doubling episodes.
///
/// An episode ends once some pair's in-episode visits reach its count at the
/// start of the episode (or 1). Confidence radii follow Jaksch, Ortner and
/// Auer: `sqrt(7 ln(2 S A t / δ) / (2 N))` for rewards and
/// `sqrt(14 S ln(2 A t / δ) / N)` in L1 for transitions, `N` clamped to 1.
#[derive(Debug, Clone)]
pub struct Ucrl2 {
    num_states: usize,
    num_actions: usize,
    delta: f64,
    counts: TransitionCounts,
    episode_start: Vec<u64>,
    policy: Vec<usize>,
    needs_plan: bool,
    episodes: usize,
    capped_plans: usize,
    steps: usize,
}

impl Ucrl2 {
    pub fn new(num_states: usize, num_actions: usize, config: Ucrl2Config) -> Self {
        Self {
            num_states,
            num_actions,
            delta: config.delta,
            counts: TransitionCounts::new(num_states, num_actions),
            episode_start: vec![0; num_states * num_actions],
            policy: vec![0; num_states],
            needs_plan: true,
            episodes: 0,
            capped_plans: 0,
            steps: 0,
        }
    }

    /// Add externally collected samples; the next step starts a new episode.
    pub fn ingest(&mut self, counts: &TransitionCounts) {
        self.counts.merge(counts);
        self.needs_plan = true;
    }

    pub fn episodes(&self) -> usize {
        self.episodes
    }

    pub fn policy(&self) -> &[usize] {
        &self.policy
    }

    pub fn counts(&self) -> &TransitionCounts {
        &self.counts
    }

    /// Plans where value iteration hit its sweep cap.
    pub fn capped_plans(&self) -> usize {
        self.capped_plans
    }

    fn plan(&mut self) {
        let ns = self.num_states;
        let na = self.num_actions;
        let t = (self.counts.total() as f64).max(1.0);
        let log_r = (2.0 * (ns * na) as f64 * t / self.delta).ln();
        let log_p = (2.0 * na as f64 * t / self.delta).ln();
        let mut reward = vec![0.0; ns * na];
        let mut p_hat = vec![0.0; ns * na * ns];
        let mut radius = vec![0.0; ns * na];
        for s in 0..ns {
            for a in 0..na {
                let idx = s * na + a;
                let n = self.counts.visits(s, a);
                let nf = (n as f64).max(1.0);
                let mean = if n == 0 { 0.0 } else { self.counts.reward_sum(s, a) / n as f64 };
                reward[idx] = mean + (7.0 * log_r / (2.0 * nf)).sqrt();
                radius[idx] = (14.0 * ns as f64 * log_p / nf).sqrt();
                if n > 0 {
                    for (dst, &c) in p_hat[idx * ns..(idx + 1) * ns]
                        .iter_mut()
                        .zip(self.counts.next_counts(s, a))
                    {
                        *dst = c as f64 / n as f64;
                    }
                }
            }
        }
        let outcome = extended_value_iteration(ns, na, &reward, &p_hat, &radius);
        if outcome.converged {
            self.policy = outcome.policy;
        } else {
            self.capped_plans += 1;
            log::warn!(
                "extended value iteration hit {} sweeps; keeping the previous policy",
                EVI_MAX_ITERATIONS
            );
        }
        for s in 0..ns {
            for a in 0..na {
                self.episode_start[s * na + a] = self.counts.visits(s, a);
            }
        }
        self.episodes += 1;
        self.needs_plan = false;
    }

    fn episode_over(&self, state: usize) -> bool {
        let a = self.policy[state];
        let start = self.episode_start[state * self.num_actions + a];
        let now = self.counts.visits(state, a);
        now - start >= start.max(1)
    }
}

impl Agent for Ucrl2 {
    fn select_action(&mut self, state: usize, _t: usize) -> usize {
        if self.needs_plan || self.episode_over(state) {
            self.plan();
        }
        self.policy[state]
    }

    fn observe(&mut self, tr: &Transition) {
        self.counts.record(tr.state, tr.action, tr.reward, tr.next_state);
        self.steps += 1;
    }

    fn steps_consumed(&self) -> usize {
        self.steps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::jump_riverswim;
    use crate::rng::RngStream;

    #[test]
    fn single_state_converges_at_once() {
        let reward = [0.2, 0.7, 0.5];
        let p_hat = [1.0, 1.0, 1.0];
        let radius = [0.3, 0.3, 0.3];
        let out = extended_value_iteration(1, 3, &reward, &p_hat, &radius);
        assert!(out.converged);
        assert_eq!(out.iterations, 1);
        assert_eq!(out.policy, vec![1]);
    }

    #[test]
    fn optimistic_mass_moves_to_best_state() {
        let mut p = [0.0; 3];
        optimistic_distribution(&[0.5, 0.3, 0.2], 0.4, &[2, 0, 1], &mut p);
        assert!((p[2] - 0.4).abs() < 1e-12);
        assert!((p[1] - 0.1).abs() < 1e-12);
        assert!((p[0] - 0.5).abs() < 1e-12);
        optimistic_distribution(&[0.0, 0.0, 0.0], 5.0, &[1, 0, 2], &mut p);
        assert_eq!(p, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn episodes_follow_doubling_bound() {
        let mdp = jump_riverswim(4);
        let horizon = 5000;
        let mut agent = Ucrl2::new(5, 2, Ucrl2Config::default());
        let mut env = RngStream::new(3);
        let mut s = 0;
        for t in 0..=horizon {
            let a = agent.select_action(s, t);
            let r = mdp.sample_reward(s, a, &mut env);
            let next = mdp.sample_transition(s, a, &mut env);
            agent.observe(&Transition { t, state: s, action: a, reward: r, next_state: next });
            s = next;
        }
        let sa = 10.0;
        assert!((agent.episodes() as f64) <= sa * (horizon as f64).log2() + sa);
        assert_eq!(agent.capped_plans(), 0);
        assert_eq!(agent.steps_consumed(), horizon + 1);
    }

    #[test]
    fn ingest_forces_replanning() {
        let mut agent = Ucrl2::new(2, 2, Ucrl2Config::default());
        agent.select_action(0, 0);
        assert_eq!(agent.episodes(), 1);
        let mut counts = TransitionCounts::new(2, 2);
        for _ in 0..50 {
            counts.record(0, 1, 1.0, 0);
            counts.record(0, 0, 0.0, 0);
        }
        agent.ingest(&counts);
        assert_eq!(agent.select_action(0, 1), 1);
        assert_eq!(agent.episodes(), 2);
    }
}
