//! Exact dynamic programming oracles.
//!
//! Horizon convention: a run makes `T + 1` decisions at `t = 0..=T`, and the
//! remaining horizon at decision `t` is `h = T - t + 1`, so the last decision
//! looks one step ahead. All argmax ties go to the lowest action index.

mod bellman;
mod policy;
mod theory;

pub use bellman::{
    argmax, backward_induction, k_step_rewards, optimal_start_values, KStepRewardTable,
    StageValueTables,
};
pub use policy::{
    evaluate_policy, greedy_policy, thresholding_policy, ActionRule, PolicyEvaluation, PolicyKind,
    PolicySpec,
};
pub use theory::{
    build_linear_gap_instance, check_stochastic_dominance, competitive_ratio, DominanceCheck,
};

/// Remaining horizon `h = T - t + 1` at decision `t`.
pub fn remaining_horizon(t: usize, horizon: usize) -> usize {
    debug_assert!(t <= horizon);
    horizon - t + 1
}

/// Lookahead depth used at decision `t`: `min(h, K)`.
pub fn effective_depth(t: usize, horizon: usize, k: usize) -> usize {
    remaining_horizon(t, horizon).min(k)
}
