//! Online learners behind a single [`Agent`] protocol.
//!
//! Agents see only `(s, a, r, s')` tuples; nothing here reads an MDP's true
//! transition or reward tables. Every call to [`Agent::select_action`] is
//! followed by exactly one [`Agent::observe`] for the same step, so
//! multi-step subroutines (the estimation rollouts of LGKT) are driven one
//! environment step at a time and report themselves through [`Agent::phase`].

pub mod baselines;
mod hybrid;
mod lcb;
mod lg1t;
mod lgkt;
mod sub_alg;
mod threshold;

use serde::{Deserialize, Serialize};

pub use hybrid::{Lg12t, Lg1tRl, TransitionCounts};
pub use lcb::{confidence_width, exploration_fn, select_thresholded, ucb_index, LcbState, Selection};
pub use lg1t::{Lg1t, Lg1tConfig};
pub use lgkt::{exploration_probability, ContinuationEstimator, Lgkt, LgktConfig, Rollout, StepAccounting};
pub use sub_alg::SubAlgUcb;
pub use threshold::ThresholdSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Action chosen from the certified good set, or by a baseline's own rule.
    Exploit,
    /// Fallback selection, or the first step of an estimation rollout.
    Explore,
    /// Later steps of an estimation rollout.
    Subroutine,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Exploit => "exploit",
            Phase::Explore => "explore",
            Phase::Subroutine => "subroutine",
        }
    }
}

impl std::str::FromStr for Phase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exploit" => Ok(Phase::Exploit),
            "explore" => Ok(Phase::Explore),
            "subroutine" => Ok(Phase::Subroutine),
            other => Err(format!("unknown phase `{other}`")),
        }
    }
}

/// How a thresholding learner picks an action when no action is certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplorationMode {
    /// Uniform over all actions.
    Uniform,
    /// Largest [`ucb_index`], unvisited actions first.
    #[default]
    UcbIndex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub t: usize,
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub next_state: usize,
}

pub trait Agent: Send {
    fn select_action(&mut self, state: usize, t: usize) -> usize;

    fn observe(&mut self, transition: &Transition);

    /// Phase of the most recent selection.
    fn phase(&self) -> Phase {
        Phase::Exploit
    }

    /// Environment steps consumed so far.
    fn steps_consumed(&self) -> usize;
}

impl<A: Agent + ?Sized> Agent for Box<A> {
    fn select_action(&mut self, state: usize, t: usize) -> usize {
        (**self).select_action(state, t)
    }

    fn observe(&mut self, transition: &Transition) {
        (**self).observe(transition)
    }

    fn phase(&self) -> Phase {
        (**self).phase()
    }

    fn steps_consumed(&self) -> usize {
        (**self).steps_consumed()
    }
}
