use serde::{Deserialize, Serialize};

use super::bellman::k_step_rewards;
use super::effective_depth;
use crate::agents::ThresholdSchedule;
use crate::error::Result;
use crate::mdp::TabularMdp;
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActionRule {
    Fixed { action: usize },
    /// Uniform over `set`; `fallback` is played when `set` is empty.
    Uniform { set: Vec<usize>, fallback: usize },
}

impl ActionRule {
    /// Action probabilities, in ascending action order.
    pub fn distribution(&self) -> Vec<(usize, f64)> {
        match self {
            ActionRule::Fixed { action } => vec![(*action, 1.0)],
            ActionRule::Uniform { set, fallback } if set.is_empty() => vec![(*fallback, 1.0)],
            ActionRule::Uniform { set, .. } => {
                let p = 1.0 / set.len() as f64;
                set.iter().map(|&a| (a, p)).collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Deterministic,
    UniformOverSet,
}

/// A Markov policy over decisions `t = 0..=T`.
///
/// Consecutive stages with identical rules share one entry of `rules`;
/// `stage_rule[t]` points at the rule row used at stage `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySpec {
    horizon: usize,
    num_states: usize,
    kind: PolicyKind,
    rules: Vec<Vec<ActionRule>>,
    stage_rule: Vec<usize>,
}

impl PolicySpec {
    pub fn from_stages(
        horizon: usize,
        num_states: usize,
        kind: PolicyKind,
        mut stage: impl FnMut(usize) -> Vec<ActionRule>,
    ) -> Self {
        let mut rules: Vec<Vec<ActionRule>> = Vec::new();
        let mut stage_rule = Vec::with_capacity(horizon + 1);
        for t in 0..=horizon {
            let row = stage(t);
            assert_eq!(row.len(), num_states, "stage {t} must cover every state");
            if rules.last() != Some(&row) {
                rules.push(row);
            }
            stage_rule.push(rules.len() - 1);
        }
        Self {
            horizon,
            num_states,
            kind,
            rules,
            stage_rule,
        }
    }

    /// Uniform over all actions at every stage and state.
    pub fn uniform_random(horizon: usize, num_states: usize, num_actions: usize) -> Self {
        let all: Vec<usize> = (0..num_actions).collect();
        Self::from_stages(horizon, num_states, PolicyKind::UniformOverSet, |_| {
            vec![
                ActionRule::Uniform {
                    set: all.clone(),
                    fallback: 0,
                };
                num_states
            ]
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn rule(&self, t: usize, s: usize) -> &ActionRule {
        &self.rules[self.stage_rule[t]][s]
    }

    pub fn distribution(&self, t: usize, s: usize) -> Vec<(usize, f64)> {
        self.rule(t, s).distribution()
    }

    /// The single action played at `(t, s)`, if the rule is a point mass.
    pub fn point_action(&self, t: usize, s: usize) -> Option<usize> {
        match self.distribution(t, s).as_slice() {
            [(a, _)] => Some(*a),
            _ => None,
        }
    }

    pub fn sample(&self, t: usize, s: usize, rng: &mut RngStream) -> usize {
        match self.rule(t, s) {
            ActionRule::Fixed { action } => *action,
            ActionRule::Uniform { set, fallback } if set.is_empty() => *fallback,
            ActionRule::Uniform { set, .. } => set[rng.index(set.len())],
        }
    }

    /// True when every referenced action is below `num_actions`.
    pub fn actions_in_range(&self, num_actions: usize) -> bool {
        self.rules.iter().flatten().all(|rule| match rule {
            ActionRule::Fixed { action } => *action < num_actions,
            ActionRule::Uniform { set, fallback } => {
                *fallback < num_actions && set.iter().all(|&a| a < num_actions)
            }
        })
    }

    /// Same action distribution at every `(t, s)`.
    pub fn same_behavior(&self, other: &PolicySpec) -> bool {
        self.horizon == other.horizon
            && self.num_states == other.num_states
            && (0..=self.horizon).all(|t| {
                (0..self.num_states).all(|s| self.distribution(t, s) == other.distribution(t, s))
            })
    }
}

/// `a_t = argmax_a r^{min(h,K)}_{s,a}`.
pub fn greedy_policy(mdp: &TabularMdp, k: usize, horizon: usize) -> PolicySpec {
    assert!(k >= 1, "lookahead depth must be at least 1");
    let table = k_step_rewards(mdp, k.min(horizon + 1));
    PolicySpec::from_stages(horizon, mdp.num_states(), PolicyKind::Deterministic, |t| {
        let d = effective_depth(t, horizon, k);
        (0..mdp.num_states())
            .map(|s| ActionRule::Fixed {
                action: table.best_action(d, s),
            })
            .collect()
    })
}

/// Uniform over `{a : r^{min(h,K)}_{s,a} >= γ_t}`, falling back to `a*_{s,min(h,K)}`.
pub fn thresholding_policy(
    mdp: &TabularMdp,
    k: usize,
    gamma: &ThresholdSchedule,
    horizon: usize,
) -> Result<PolicySpec> {
    assert!(k >= 1, "lookahead depth must be at least 1");
    gamma.check_covers(horizon)?;
    let table = k_step_rewards(mdp, k.min(horizon + 1));
    Ok(PolicySpec::from_stages(
        horizon,
        mdp.num_states(),
        PolicyKind::UniformOverSet,
        |t| {
            let d = effective_depth(t, horizon, k);
            let g = gamma.at(t);
            (0..mdp.num_states())
                .map(|s| {
                    let row = table.row(d, s);
                    ActionRule::Uniform {
                        set: (0..row.len()).filter(|&a| row[a] >= g).collect(),
                        fallback: table.best_action(d, s),
                    }
                })
                .collect()
        },
    ))
}

/// Exact `V^π_h(s)` for all stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyEvaluation {
    horizon: usize,
    num_states: usize,
    /// Flat `[h][s]`.
    v: Vec<f64>,
}

impl PolicyEvaluation {
    pub fn v(&self, h: usize, s: usize) -> f64 {
        self.v[h * self.num_states + s]
    }

    pub fn start_values(&self) -> &[f64] {
        &self.v[..self.num_states]
    }
}

/// Backward recursion of the policy's expected reward-to-go.
pub fn evaluate_policy(mdp: &TabularMdp, policy: &PolicySpec) -> PolicyEvaluation {
    let ns = mdp.num_states();
    let horizon = policy.horizon();
    let mut v = vec![0.0; (horizon + 1) * ns];
    for t in (0..=horizon).rev() {
        let (head, tail) = v.split_at_mut((t + 1) * ns);
        let next = if t == horizon { None } else { Some(&tail[..ns]) };
        for s in 0..ns {
            let mut value = 0.0;
            for (a, prob) in policy.distribution(t, s) {
                let cont: f64 = match next {
                    None => 0.0,
                    Some(next_v) => mdp
                        .transition_row(s, a)
                        .iter()
                        .zip(next_v)
                        .map(|(p, v)| p * v)
                        .sum(),
                };
                value += prob * (mdp.mean_reward(s, a) + cont);
            }
            head[t * ns + s] = value;
        }
    }
    PolicyEvaluation {
        horizon,
        num_states: ns,
        v,
    }
}
