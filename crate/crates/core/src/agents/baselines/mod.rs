//! Reference learners the thresholding agents are compared against.

mod optimistic_q;
mod q_episodic;
mod ucrl2;

pub use optimistic_q::{OptimisticQ, OptimisticQConfig};
pub use q_episodic::{EpisodicQ, EpisodicQConfig};
pub use ucrl2::{extended_value_iteration, EviOutcome, Ucrl2, Ucrl2Config};

use super::{Agent, Transition};
use crate::rng::RngStream;

/// Uniformly random actions.
#[derive(Debug, Clone)]
pub struct UniformRandom {
    num_actions: usize,
    rng: RngStream,
    steps: usize,
}

impl UniformRandom {
    pub fn new(num_actions: usize, rng: RngStream) -> Self {
        Self {
            num_actions,
            rng,
            steps: 0,
        }
    }
}

impl Agent for UniformRandom {
    fn select_action(&mut self, _state: usize, _t: usize) -> usize {
        self.rng.index(self.num_actions)
    }

    fn observe(&mut self, _transition: &Transition) {
        self.steps += 1;
    }

    fn steps_consumed(&self) -> usize {
        self.steps
    }
}

/// First index of the largest entry.
pub(crate) fn greedy(values: &[f64]) -> usize {
    crate::planning::argmax(values)
}
