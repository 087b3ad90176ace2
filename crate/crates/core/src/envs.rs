//! The benchmark environments as [`TabularMdp`] values.

use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{RewardNoise, TabularMdp};
use crate::rng::RngStream;

/// Gamma parameters for random instances, parameterized as (shape, scale) so
/// the mean is `shape * scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticMdpParams {
    pub reward_shape: f64,
    pub reward_scale: f64,
    pub transition_shape: f64,
    pub transition_scale: f64,
    pub reward_variance: f64,
}

impl SyntheticMdpParams {
    /// Ten-state, five-action suite.
    pub fn small() -> Self {
        Self {
            reward_shape: 0.5,
            reward_scale: 1.0,
            transition_shape: 0.1,
            transition_scale: 10.0,
            reward_variance: 0.5,
        }
    }

    /// Hundred-state, twenty-five-action suite: much sparser transition rows.
    pub fn large() -> Self {
        Self {
            transition_shape: 0.01,
            transition_scale: 1000.0,
            ..Self::small()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.reward_shape,
            self.reward_scale,
            self.transition_shape,
            self.transition_scale,
        ];
        if positive.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(Error::Config(format!(
                "gamma shapes and scales must be positive: {self:?}"
            )));
        }
        if !(self.reward_variance >= 0.0 && self.reward_variance.is_finite()) {
            return Err(Error::Config(format!(
                "reward variance must be nonnegative, got {}",
                self.reward_variance
            )));
        }
        Ok(())
    }
}

/// Row sums below this are redrawn before normalization.
const MIN_ROW_MASS: f64 = 1e-300;

/// Random instance: Gamma mean rewards, Gamma-then-normalized transition rows,
/// Gaussian reward noise. Rewards are drawn first (state-major), then rows in
/// `[action][state]` order.
pub fn gen_synthetic_mdp(
    num_states: usize,
    num_actions: usize,
    params: &SyntheticMdpParams,
    rng: &mut RngStream,
) -> Result<TabularMdp> {
    if num_states == 0 || num_actions == 0 {
        return Err(Error::Config("synthetic MDP needs S, A >= 1".into()));
    }
    params.validate()?;
    let reward_dist = Gamma::new(params.reward_shape, params.reward_scale)
        .map_err(|e| Error::Config(e.to_string()))?;
    let row_dist = Gamma::new(params.transition_shape, params.transition_scale)
        .map_err(|e| Error::Config(e.to_string()))?;

    let rewards: Vec<Vec<f64>> = (0..num_states)
        .map(|_| (0..num_actions).map(|_| reward_dist.sample(rng)).collect())
        .collect();
    let mut transitions = vec![vec![Vec::new(); num_states]; num_actions];
    for block in transitions.iter_mut() {
        for row in block.iter_mut() {
            *row = loop {
                let draw: Vec<f64> = (0..num_states).map(|_| row_dist.sample(rng)).collect();
                let sum: f64 = draw.iter().sum();
                if sum >= MIN_ROW_MASS {
                    break draw.into_iter().map(|x| x / sum).collect();
                }
            };
        }
    }
    TabularMdp::new(
        transitions,
        rewards,
        RewardNoise::Gaussian {
            variance: params.reward_variance,
        },
    )
}

pub const LEFT: usize = 0;
pub const RIGHT: usize = 1;

/// Uniform jump mass spread over every state of a JumpRiverSwim row.
const JUMP_MASS: f64 = 0.01;

/// JumpRiverSwim chain with states `0..=max_index` and actions `{left, right}`.
///
/// Every row spreads 0.01 uniformly over all states and places the remaining
/// 0.99 on the chain move:
///
/// | state      | left       | right                                  |
/// |------------|------------|----------------------------------------|
/// | 0          | stay 0.99  | stay 0.7, right 0.29                   |
/// | interior   | left 0.99  | left 0.6, stay 0.1, right 0.29         |
/// | max_index  | left 0.99  | left 0.7, stay 0.29                    |
///
/// Rewards are 0.2 for `left` at state 0, 1 for `right` at `max_index`, zero
/// elsewhere, without noise.
pub fn jump_riverswim(max_index: usize) -> TabularMdp {
    assert!(max_index >= 2, "JumpRiverSwim needs at least three states");
    let n = max_index + 1;
    let jump = JUMP_MASS / n as f64;
    let mut transitions = vec![vec![vec![jump; n]; n]; 2];
    for s in 0..n {
        let left = &mut transitions[LEFT][s];
        if s == 0 {
            left[0] += 1.0 - JUMP_MASS;
        } else {
            left[s - 1] += 1.0 - JUMP_MASS;
        }
        let right = &mut transitions[RIGHT][s];
        if s == 0 {
            right[0] += 0.7;
            right[1] += 0.3 - JUMP_MASS;
        } else if s == max_index {
            right[s - 1] += 0.7;
            right[s] += 0.3 - JUMP_MASS;
        } else {
            right[s - 1] += 0.6;
            right[s] += 0.1;
            right[s + 1] += 0.3 - JUMP_MASS;
        }
    }
    let mut rewards = vec![vec![0.0; 2]; n];
    rewards[0][LEFT] = 0.2;
    rewards[max_index][RIGHT] = 1.0;
    TabularMdp::new(transitions, rewards, RewardNoise::Deterministic)
        .expect("JumpRiverSwim shapes are consistent")
}

/// The standard 4×4 FrozenLake map, row-major from the start tile.
pub const FROZEN_LAKE_MAP: [&str; 4] = ["SFFF", "FHFH", "FFFH", "HFFG"];

pub const FROZEN_LAKE_ACTIONS: [&str; 4] = ["left", "down", "right", "up"];

/// FrozenLake on the 4×4 map. Actions are `{left, down, right, up}`. On the
/// start and frozen tiles the move goes in the intended direction or either
/// perpendicular one with probability 1/3 each; moving off the grid stays in
/// place. Holes and the goal send the player back to the start on the next
/// step. Rewards: 0 in a hole, 0.2 on the start and frozen tiles, 1 at the goal.
pub fn frozen_lake_4x4() -> TabularMdp {
    let tiles: Vec<u8> = FROZEN_LAKE_MAP.iter().flat_map(|row| row.bytes()).collect();
    let side = 4usize;
    let n = side * side;
    let step = |s: usize, dir: usize| -> usize {
        let (r, c) = (s / side, s % side);
        match dir {
            0 if c > 0 => s - 1,
            1 if r + 1 < side => s + side,
            2 if c + 1 < side => s + 1,
            3 if r > 0 => s - side,
            _ => s,
        }
    };
    let mut transitions = vec![vec![vec![0.0; n]; n]; 4];
    let mut rewards = vec![vec![0.0; 4]; n];
    for s in 0..n {
        let terminal = matches!(tiles[s], b'H' | b'G');
        let reward = match tiles[s] {
            b'H' => 0.0,
            b'G' => 1.0,
            _ => 0.2,
        };
        for a in 0..4 {
            rewards[s][a] = reward;
            let row = &mut transitions[a][s];
            if terminal {
                row[0] = 1.0;
            } else {
                for dir in [(a + 3) % 4, a, (a + 1) % 4] {
                    row[step(s, dir)] += 1.0 / 3.0;
                }
            }
        }
    }
    TabularMdp::new(transitions, rewards, RewardNoise::Deterministic)
        .expect("FrozenLake shapes are consistent")
}
