//! Constructions and checks tied to the optimality results for lookahead
//! greedy policies.

use super::bellman::{argmax, optimal_start_values};
use super::policy::{evaluate_policy, greedy_policy};
use crate::error::{Error, Result};
use crate::mdp::{RewardNoise, TabularMdp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominanceCheck {
    Holds,
    /// `max_a R_{1,a} < max_a R_{0,a}`: state 1 is not the high-reward state.
    RewardOrder,
    /// `P_a(s, 1) > P_{a*_{s,1}}(s, 1)` for this `(s, a)`.
    Transition { state: usize, action: usize },
}

impl DominanceCheck {
    pub fn holds(&self) -> bool {
        matches!(self, DominanceCheck::Holds)
    }
}

/// Two-state stochastic dominance: state 1 has the larger best reward, and in
/// both states the one-step greedy action is the most likely to reach state 1.
pub fn check_stochastic_dominance(mdp: &TabularMdp) -> Result<DominanceCheck> {
    if mdp.num_states() != 2 {
        return Err(Error::NotBinaryStateSpace(mdp.num_states()));
    }
    let best = |s: usize| {
        let row = mdp.reward_row(s);
        row[argmax(row)]
    };
    if best(1) < best(0) {
        return Ok(DominanceCheck::RewardOrder);
    }
    for state in 0..2 {
        let greedy = argmax(mdp.reward_row(state));
        let reach = mdp.transition(greedy, state, 1);
        for action in 0..mdp.num_actions() {
            if mdp.transition(action, state, 1) > reach {
                return Ok(DominanceCheck::Transition { state, action });
            }
        }
    }
    Ok(DominanceCheck::Holds)
}

/// Instance on which the `K`-step greedy policy loses `T - K` from state `B`.
///
/// States are `[B, G, D_1 .. D_{S-2}]`, actions `[a_0, a_1, ...]` where every
/// action after `a_1` copies `a_1` and every `D_i` copies `G`. From `B`, `a_0`
/// stays put at reward -1 and `a_1` pays `-(K+1)` to move uniformly into the
/// good block; inside the good block `a_0` earns 0 and stays, `a_1` pays -1 and
/// returns to `B`.
pub fn build_linear_gap_instance(num_states: usize, num_actions: usize, k: usize) -> TabularMdp {
    assert!(num_states >= 2 && num_actions >= 2, "need at least two states and two actions");
    let good_mass = 1.0 / (num_states - 1) as f64;
    let transition = |a: usize, s: usize, next: usize| -> f64 {
        let bad = s == 0;
        match (bad, a == 0) {
            (true, true) => (next == 0) as u8 as f64,
            (true, false) | (false, true) => {
                if next == 0 {
                    0.0
                } else {
                    good_mass
                }
            }
            (false, false) => (next == 0) as u8 as f64,
        }
    };
    let reward = |s: usize, a: usize| -> f64 {
        match (s == 0, a == 0) {
            (true, true) => -1.0,
            (true, false) => -((k + 1) as f64),
            (false, true) => 0.0,
            (false, false) => -1.0,
        }
    };
    TabularMdp::from_fn(num_states, num_actions, transition, reward, RewardNoise::Deterministic)
        .expect("shapes are consistent by construction")
}

/// `V^{π^{K,greedy}}_0(s0) / V*_0(s0)`; an error unless `V*_0(s0) > 0`.
pub fn competitive_ratio(mdp: &TabularMdp, k: usize, horizon: usize, s0: usize) -> Result<f64> {
    let optimal = optimal_start_values(mdp, horizon)[s0];
    if !(optimal > 0.0) {
        return Err(Error::NonPositiveOptimum(optimal));
    }
    let greedy = evaluate_policy(mdp, &greedy_policy(mdp, k, horizon)).v(0, s0);
    Ok(greedy / optimal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::validate_mdp;
    use crate::planning::backward_induction;

    fn two_state(p: [[[f64; 2]; 2]; 3], r: [[f64; 3]; 2]) -> TabularMdp {
        TabularMdp::from_fn(2, 3, |a, s, n| p[a][s][n], |s, a| r[s][a], RewardNoise::Deterministic)
            .unwrap()
    }

    #[test]
    fn dominance_holds_when_greedy_action_reaches_good_state() {
        let mdp = two_state(
            [[[0.0, 1.0], [0.0, 1.0]], [[0.5, 0.5], [0.6, 0.4]], [[1.0, 0.0], [1.0, 0.0]]],
            [[0.5, 0.1, 0.2], [0.9, 0.3, 0.1]],
        );
        assert_eq!(check_stochastic_dominance(&mdp).unwrap(), DominanceCheck::Holds);
    }

    #[test]
    fn dominance_violation_has_witness() {
        let mdp = two_state(
            [[[0.8, 0.2], [0.0, 1.0]], [[0.1, 0.9], [0.5, 0.5]], [[1.0, 0.0], [1.0, 0.0]]],
            [[0.5, 0.1, 0.2], [0.9, 0.3, 0.1]],
        );
        assert_eq!(
            check_stochastic_dominance(&mdp).unwrap(),
            DominanceCheck::Transition { state: 0, action: 1 }
        );
    }

    #[test]
    fn dominance_needs_two_states() {
        let mdp = build_linear_gap_instance(3, 2, 1);
        assert!(matches!(
            check_stochastic_dominance(&mdp),
            Err(Error::NotBinaryStateSpace(3))
        ));
    }

    #[test]
    fn smallest_gap_instance() {
        let mdp = build_linear_gap_instance(2, 2, 1);
        assert!(validate_mdp(&mdp).is_valid());
        assert_eq!(mdp.transition(1, 0, 1), 1.0);
        assert_eq!(mdp.transition(0, 1, 1), 1.0);
        assert_eq!(mdp.transition(0, 0, 0), 1.0);
        assert_eq!(mdp.transition(1, 1, 0), 1.0);
        assert_eq!(mdp.reward_row(0), &[-1.0, -2.0]);
        assert_eq!(mdp.reward_row(1), &[0.0, -1.0]);
    }

    #[test]
    fn gap_instance_values() {
        let (k, t) = (1, 5);
        let mdp = build_linear_gap_instance(2, 2, k);
        let tables = backward_induction(&mdp, t);
        assert_eq!(tables.v(0, 0), -2.0);
        // staying one step at B, then paying -(K+1) to leave
        assert_eq!(tables.q(0, 0, 0), -3.0);
        let greedy = greedy_policy(&mdp, k, t);
        for stage in 0..=t {
            assert_eq!(greedy.point_action(stage, 0), Some(0));
        }
        assert_eq!(evaluate_policy(&mdp, &greedy).v(0, 0), -6.0);

        let t = 10;
        let greedy = evaluate_policy(&mdp, &greedy_policy(&mdp, 1, t)).v(0, 0);
        assert_eq!(greedy, -11.0);
        assert_eq!(backward_induction(&mdp, t).v(0, 0) - greedy, 9.0);
    }

    #[test]
    fn larger_gap_instance() {
        let mdp = build_linear_gap_instance(4, 3, 2);
        assert!(validate_mdp(&mdp).is_valid());
        let t = 8;
        let optimal = backward_induction(&mdp, t).v(0, 0);
        let greedy = evaluate_policy(&mdp, &greedy_policy(&mdp, 2, t)).v(0, 0);
        assert!((optimal - greedy - 6.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_rejects_negative_optimum() {
        let mdp = build_linear_gap_instance(2, 2, 1);
        assert!(matches!(
            competitive_ratio(&mdp, 1, 5, 0),
            Err(Error::NonPositiveOptimum(v)) if v == -2.0
        ));
    }

    #[test]
    fn ratio_is_one_with_full_lookahead() {
        let mdp = two_state(
            [[[0.3, 0.7], [0.2, 0.8]], [[0.9, 0.1], [0.5, 0.5]], [[0.5, 0.5], [1.0, 0.0]]],
            [[0.5, 0.9, 0.2], [0.4, 0.3, 0.8]],
        );
        let ratio = competitive_ratio(&mdp, 7, 6, 0).unwrap();
        assert!((ratio - 1.0).abs() < 1e-12);
    }
}
