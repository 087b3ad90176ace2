use super::baselines::Ucrl2;
use super::lg1t::{Lg1t, Lg1tConfig};
use super::lgkt::{Lgkt, LgktConfig};
use super::{Agent, Phase, Transition};
use crate::rng::RngStream;

/// Empirical transition and reward counts.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionCounts {
    num_states: usize,
    num_actions: usize,
    visits: Vec<u64>,
    next: Vec<u64>,
    reward_sum: Vec<f64>,
}

impl TransitionCounts {
    pub fn new(num_states: usize, num_actions: usize) -> Self {
        Self {
            num_states,
            num_actions,
            visits: vec![0; num_states * num_actions],
            next: vec![0; num_states * num_actions * num_states],
            reward_sum: vec![0.0; num_states * num_actions],
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn record(&mut self, state: usize, action: usize, reward: f64, next_state: usize) {
        let idx = state * self.num_actions + action;
        self.visits[idx] += 1;
        self.reward_sum[idx] += reward;
        self.next[idx * self.num_states + next_state] += 1;
    }

    pub fn merge(&mut self, other: &TransitionCounts) {
        assert_eq!(
            (self.num_states, self.num_actions),
            (other.num_states, other.num_actions),
            "count tables differ in shape"
        );
        self.visits.iter_mut().zip(&other.visits).for_each(|(a, b)| *a += b);
        self.next.iter_mut().zip(&other.next).for_each(|(a, b)| *a += b);
        self.reward_sum.iter_mut().zip(&other.reward_sum).for_each(|(a, b)| *a += b);
    }

    pub fn visits(&self, state: usize, action: usize) -> u64 {
        self.visits[state * self.num_actions + action]
    }

    pub fn reward_sum(&self, state: usize, action: usize) -> f64 {
        self.reward_sum[state * self.num_actions + action]
    }

    /// Successor counts of `(state, action)`.
    pub fn next_counts(&self, state: usize, action: usize) -> &[u64] {
        let idx = state * self.num_actions + action;
        &self.next[idx * self.num_states..(idx + 1) * self.num_states]
    }

    pub fn total(&self) -> u64 {
        self.visits.iter().sum()
    }
}

enum Stage<T> {
    Head(Lg1t),
    Tail(T),
    Switching,
}

/// LG1T for `t ≤ t_c`, then LGKT with `K = 2` warm-started from LG1T's
/// one-step statistics.
///
/// The tail draws from its own stream, derived from the head's seed, so the
/// head's draws are the same as a standalone LG1T's.
pub struct Lg12t {
    stage: Stage<Lgkt>,
    tail_config: LgktConfig,
    tail_rng: Option<RngStream>,
    t_c: usize,
    prev: Option<(usize, usize)>,
    head_steps: usize,
}

impl Lg12t {
    pub fn new(
        num_states: usize,
        num_actions: usize,
        head: Lg1tConfig,
        tail: LgktConfig,
        t_c: usize,
        rng: RngStream,
    ) -> Self {
        assert_eq!(tail.k, 2, "the LG1-2T tail uses K = 2");
        let tail_rng = RngStream::derive(rng.seed(), 1);
        Self {
            stage: Stage::Head(Lg1t::new(num_states, num_actions, head, rng)),
            tail_config: tail,
            tail_rng: Some(tail_rng),
            t_c,
            prev: None,
            head_steps: 0,
        }
    }

    pub fn switched(&self) -> bool {
        matches!(self.stage, Stage::Tail(_))
    }

    fn switch(&mut self) {
        if !matches!(self.stage, Stage::Head(_)) {
            return;
        }
        if let Stage::Head(head) = std::mem::replace(&mut self.stage, Stage::Switching) {
            let (stats, _) = head.into_parts();
            let rng = self.tail_rng.take().expect("tail stream used once");
            let tail = Lgkt::warm_start(self.tail_config.clone(), stats.with_depth(2), self.prev, rng);
            self.stage = Stage::Tail(tail);
        }
    }
}

impl Agent for Lg12t {
    fn select_action(&mut self, state: usize, t: usize) -> usize {
        if t > self.t_c {
            self.switch();
        }
        match &mut self.stage {
            Stage::Head(head) => head.select_action(state, t),
            Stage::Tail(tail) => tail.select_action(state, t),
            Stage::Switching => unreachable!(),
        }
    }

    fn observe(&mut self, tr: &Transition) {
        self.prev = Some((tr.state, tr.action));
        match &mut self.stage {
            Stage::Head(head) => {
                head.observe(tr);
                self.head_steps += 1;
            }
            Stage::Tail(tail) => tail.observe(tr),
            Stage::Switching => unreachable!(),
        }
    }

    fn phase(&self) -> Phase {
        match &self.stage {
            Stage::Head(head) => head.phase(),
            Stage::Tail(tail) => tail.phase(),
            Stage::Switching => unreachable!(),
        }
    }

    fn steps_consumed(&self) -> usize {
        match &self.stage {
            Stage::Head(head) => head.steps_consumed(),
            Stage::Tail(tail) => self.head_steps + tail.steps_consumed(),
            Stage::Switching => unreachable!(),
        }
    }
}

/// LG1T for `t ≤ t_c`, then UCRL2 seeded with every transition seen so far.
pub struct Lg1tRl {
    stage: Stage<Ucrl2>,
    tail: Option<Ucrl2>,
    counts: TransitionCounts,
    t_c: usize,
    head_steps: usize,
}

impl Lg1tRl {
    pub fn new(head: Lg1t, tail: Ucrl2, num_states: usize, num_actions: usize, t_c: usize) -> Self {
        Self {
            stage: Stage::Head(head),
            tail: Some(tail),
            counts: TransitionCounts::new(num_states, num_actions),
            t_c,
            head_steps: 0,
        }
    }

    pub fn switched(&self) -> bool {
        matches!(self.stage, Stage::Tail(_))
    }
}

impl Agent for Lg1tRl {
    fn select_action(&mut self, state: usize, t: usize) -> usize {
        if t > self.t_c {
            if let Some(mut tail) = self.tail.take() {
                tail.ingest(&self.counts);
                self.stage = Stage::Tail(tail);
            }
        }
        match &mut self.stage {
            Stage::Head(head) => head.select_action(state, t),
            Stage::Tail(tail) => tail.select_action(state, t),
            Stage::Switching => unreachable!(),
        }
    }

    fn observe(&mut self, tr: &Transition) {
        match &mut self.stage {
            Stage::Head(head) => {
                head.observe(tr);
                self.counts.record(tr.state, tr.action, tr.reward, tr.next_state);
                self.head_steps += 1;
            }
            Stage::Tail(tail) => tail.observe(tr),
            Stage::Switching => unreachable!(),
        }
    }

    fn phase(&self) -> Phase {
        match &self.stage {
            Stage::Head(head) => head.phase(),
            Stage::Tail(tail) => tail.phase(),
            Stage::Switching => unreachable!(),
        }
    }

    fn steps_consumed(&self) -> usize {
        match &self.stage {
            Stage::Head(head) => head.steps_consumed(),
            Stage::Tail(tail) => self.head_steps + tail.steps_consumed(),
            Stage::Switching => unreachable!(),
        }
    }
}
