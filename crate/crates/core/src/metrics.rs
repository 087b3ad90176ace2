//! Evaluation quantities computed from recorded runs and planner tables.

use serde::{Deserialize, Serialize};

use crate::agents::{Phase, ThresholdSchedule};
use crate::error::{Error, Result};
use crate::planning::{effective_depth, KStepRewardTable};

/// Identifies a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub algorithm: String,
    pub agent: String,
    pub environment: String,
    pub instance: usize,
    pub seed: u64,
    pub horizon: usize,
    /// Lookahead depth the regret is measured against.
    pub k: usize,
    pub gamma: ThresholdSchedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub phase: Phase,
}

/// One realized trajectory of `T + 1` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub meta: RunMeta,
    pub steps: Vec<StepRecord>,
}

impl RunRecord {
    /// Steps must be `t = 0, 1, ..., T` in order.
    pub fn validate(&self) -> Result<()> {
        if self.steps.len() != self.meta.horizon + 1 {
            return Err(Error::Config(format!(
                "run has {} steps, expected {}",
                self.steps.len(),
                self.meta.horizon + 1
            )));
        }
        if let Some((i, step)) = self.steps.iter().enumerate().find(|(i, s)| s.t != *i) {
            return Err(Error::Config(format!("step {i} has t = {}", step.t)));
        }
        Ok(())
    }

    pub fn rewards(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.reward).collect()
    }

    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|s| s.reward).sum()
    }
}

/// `max(0, γ_t − r^{min(T−t+1, K)}_{s,a})`.
pub fn step_cost(
    table: &KStepRewardTable,
    gamma_t: f64,
    s: usize,
    a: usize,
    t: usize,
    horizon: usize,
    k: usize,
) -> f64 {
    let d = effective_depth(t, horizon, k);
    (gamma_t - table.get(d, s, a)).max(0.0)
}

/// Cumulative thresholding cost along `(t, s, a)` steps.
pub fn regret_trace(
    steps: &[StepRecord],
    table: &KStepRewardTable,
    gamma: &ThresholdSchedule,
    k: usize,
    horizon: usize,
) -> Vec<f64> {
    let mut total = 0.0;
    steps
        .iter()
        .map(|step| {
            total += step_cost(table, gamma.at(step.t), step.state, step.action, step.t, horizon, k);
            total
        })
        .collect()
}

/// Prefix means `Σ_{j ≤ t} r_j / (t + 1)`.
pub fn running_average(rewards: &[f64]) -> Vec<f64> {
    let mut total = 0.0;
    rewards
        .iter()
        .enumerate()
        .map(|(i, r)| {
            total += r;
            total / (i + 1) as f64
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapStats {
    /// `min |γ_t − r^K_{s,a}|` over all `(s, a, t)`.
    pub delta_k: f64,
    /// The same minimum over pairs with `r^K_{s,a} ≥ γ_t`; `None` if there
    /// are none.
    pub delta_k_plus: Option<f64>,
    /// Some `r^K` sits exactly on the threshold.
    pub degenerate: bool,
}

fn gamma_values(gamma: &ThresholdSchedule, horizon: usize) -> Vec<f64> {
    match gamma {
        ThresholdSchedule::Constant(g) => vec![*g],
        ThresholdSchedule::PerStep(_) => (0..=horizon).map(|t| gamma.at(t)).collect(),
    }
}

/// Exact gap minima; a constant schedule collapses the time dimension.
pub fn gap_stats(table: &KStepRewardTable, gamma: &ThresholdSchedule, k: usize, horizon: usize) -> GapStats {
    let mut delta_k = f64::INFINITY;
    let mut delta_k_plus: Option<f64> = None;
    let r = table.depth(k);
    for g in gamma_values(gamma, horizon) {
        for &value in r {
            let gap = g - value;
            delta_k = delta_k.min(gap.abs());
            if gap <= 0.0 {
                delta_k_plus = Some(delta_k_plus.map_or(-gap, |d| d.min(-gap)));
            }
        }
    }
    GapStats {
        delta_k,
        delta_k_plus,
        degenerate: delta_k == 0.0,
    }
}

/// Whether every state has an action meeting the threshold at every step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodActionCheck {
    /// Number of `(s, t)` with `max_a r^{min(h,K)}_{s,a} < γ_t`.
    pub violations: usize,
    /// Earliest violating `(s, t)`.
    pub first: Option<(usize, usize)>,
}

impl GoodActionCheck {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

pub fn check_good_action(
    table: &KStepRewardTable,
    gamma: &ThresholdSchedule,
    k: usize,
    horizon: usize,
) -> GoodActionCheck {
    let ns = table.num_states();
    let violates = |d: usize, s: usize, g: f64| {
        table.row(d, s).iter().cloned().fold(f64::NEG_INFINITY, f64::max) < g
    };
    let mut violations = 0;
    let mut first = None;
    match gamma {
        ThresholdSchedule::Constant(g) => {
            // Depth K for t ≤ T + 1 − K, then one step at each shallower depth.
            let deep_from = (horizon + 1).saturating_sub(k);
            for s in 0..ns {
                if horizon + 1 >= k && violates(k, s, *g) {
                    violations += deep_from + 1;
                    first = first.min_or(Some((s, 0)));
                }
                for t in (deep_from + usize::from(horizon + 1 >= k))..=horizon {
                    if violates(effective_depth(t, horizon, k), s, *g) {
                        violations += 1;
                        first = first.min_or(Some((s, t)));
                    }
                }
            }
        }
        ThresholdSchedule::PerStep(_) => {
            for t in 0..=horizon {
                let d = effective_depth(t, horizon, k);
                for s in 0..ns {
                    if violates(d, s, gamma.at(t)) {
                        violations += 1;
                        first = first.min_or(Some((s, t)));
                    }
                }
            }
        }
    }
    GoodActionCheck { violations, first }
}

trait MinOr {
    fn min_or(self, other: Self) -> Self;
}

impl MinOr for Option<(usize, usize)> {
    /// Earliest by `t`, then by state.
    fn min_or(self, other: Self) -> Self {
        match (self, other) {
            (Some(a), Some(b)) => Some(if (b.1, b.0) < (a.1, a.0) { b } else { a }),
            (a, None) => a,
            (None, b) => b,
        }
    }
}

/// Mean and standard error of the mean; the error is 0 for fewer than two
/// values.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
