use std::collections::HashMap;

/// UCB1 sampling policy for estimation rollouts.
///
/// Statistics are kept per key `(reference pair, current state, rollout
/// stage)` and never touch the learner's own estimators. With `K = 2` the
/// stage is always 0 and this is a contextual UCB keyed by
/// `(s_ref, a_ref, s)`.
#[derive(Debug, Clone, Default)]
pub struct SubAlgUcb {
    num_actions: usize,
    arms: HashMap<(usize, usize, usize), ArmStats>,
}

#[derive(Debug, Clone)]
struct ArmStats {
    counts: Vec<u64>,
    sums: Vec<f64>,
    total: u64,
}

impl SubAlgUcb {
    pub fn new(num_actions: usize) -> Self {
        Self {
            num_actions,
            arms: HashMap::new(),
        }
    }

    /// Unplayed actions first (lowest index), then the largest
    /// `mean + sqrt(2 ln N / n)`.
    pub fn select(&self, key: (usize, usize, usize)) -> usize {
        let Some(arm) = self.arms.get(&key) else {
            return 0;
        };
        if let Some(a) = arm.counts.iter().position(|&c| c == 0) {
            return a;
        }
        let log_total = (arm.total as f64).ln();
        let mut best = 0;
        let mut best_value = f64::NEG_INFINITY;
        for a in 0..self.num_actions {
            let n = arm.counts[a] as f64;
            let value = arm.sums[a] / n + (2.0 * log_total / n).sqrt();
            if value > best_value {
                best = a;
                best_value = value;
            }
        }
        best
    }

    pub fn update(&mut self, key: (usize, usize, usize), action: usize, reward: f64) {
        let na = self.num_actions;
        let arm = self.arms.entry(key).or_insert_with(|| ArmStats {
            counts: vec![0; na],
            sums: vec![0.0; na],
            total: 0,
        });
        arm.counts[action] += 1;
        arm.sums[action] += reward;
        arm.total += 1;
    }

    pub fn plays(&self, key: (usize, usize, usize), action: usize) -> u64 {
        self.arms.get(&key).map_or(0, |arm| arm.counts[action])
    }
}
