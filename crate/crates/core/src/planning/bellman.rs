use serde::{Deserialize, Serialize};

use crate::mdp::TabularMdp;

/// Index of the largest entry, ties to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// `q[s][a] = R_{s,a} + Σ_{s'} P_a(s,s') next_v[s']`, written into `q_out` (S×A flat).
pub(crate) fn bellman_backup(mdp: &TabularMdp, next_v: &[f64], q_out: &mut [f64]) {
    let (ns, na) = (mdp.num_states(), mdp.num_actions());
    for s in 0..ns {
        for a in 0..na {
            let row = mdp.transition_row(s, a);
            let continuation: f64 = row.iter().zip(next_v).map(|(p, v)| p * v).sum();
            q_out[s * na + a] = mdp.mean_reward(s, a) + continuation;
        }
    }
}

fn terminal_q(mdp: &TabularMdp, q_out: &mut [f64]) {
    for s in 0..mdp.num_states() {
        q_out[s * mdp.num_actions()..(s + 1) * mdp.num_actions()].copy_from_slice(mdp.reward_row(s));
    }
}

pub(crate) fn row_max(q: &[f64], num_actions: usize, v_out: &mut [f64]) {
    for (s, v) in v_out.iter_mut().enumerate() {
        let row = &q[s * num_actions..(s + 1) * num_actions];
        *v = row[argmax(row)];
    }
}

/// Optimal stage values `Q*_h`, `V*_h` for `h = 0..=T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageValueTables {
    horizon: usize,
    num_states: usize,
    num_actions: usize,
    /// Flat `[h][s][a]`.
    q: Vec<f64>,
    /// Flat `[h][s]`.
    v: Vec<f64>,
}

impl StageValueTables {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn q(&self, h: usize, s: usize, a: usize) -> f64 {
        self.q[(h * self.num_states + s) * self.num_actions + a]
    }

    pub fn q_row(&self, h: usize, s: usize) -> &[f64] {
        let start = (h * self.num_states + s) * self.num_actions;
        &self.q[start..start + self.num_actions]
    }

    pub fn q_stage(&self, h: usize) -> &[f64] {
        let len = self.num_states * self.num_actions;
        &self.q[h * len..(h + 1) * len]
    }

    pub fn v(&self, h: usize, s: usize) -> f64 {
        self.v[h * self.num_states + s]
    }

    pub fn v_stage(&self, h: usize) -> &[f64] {
        &self.v[h * self.num_states..(h + 1) * self.num_states]
    }

    /// Optimal action at stage `h` (Eq. 2 style argmax, lowest index on ties).
    pub fn optimal_action(&self, h: usize, s: usize) -> usize {
        argmax(self.q_row(h, s))
    }

    /// Largest `|q[h][s][a] - R - Σ P v[h+1]|` over all entries.
    pub fn bellman_residual(&self, mdp: &TabularMdp) -> f64 {
        let mut worst = 0.0_f64;
        for h in 0..=self.horizon {
            for s in 0..self.num_states {
                for a in 0..self.num_actions {
                    let cont = if h == self.horizon {
                        0.0
                    } else {
                        mdp.transition_row(s, a)
                            .iter()
                            .zip(self.v_stage(h + 1))
                            .map(|(p, v)| p * v)
                            .sum()
                    };
                    let expected = mdp.mean_reward(s, a) + cont;
                    worst = worst.max((self.q(h, s, a) - expected).abs());
                }
            }
        }
        worst
    }
}

/// Backward induction over `T + 1` decision stages.
pub fn backward_induction(mdp: &TabularMdp, horizon: usize) -> StageValueTables {
    let (ns, na) = (mdp.num_states(), mdp.num_actions());
    let stages = horizon + 1;
    let mut q = vec![0.0; stages * ns * na];
    let mut v = vec![0.0; stages * ns];
    for h in (0..stages).rev() {
        let q_h = &mut q[h * ns * na..(h + 1) * ns * na];
        if h == horizon {
            terminal_q(mdp, q_h);
        } else {
            let next_v = &v[(h + 1) * ns..(h + 2) * ns];
            bellman_backup(mdp, next_v, q_h);
        }
        row_max(q_h, na, &mut v[h * ns..(h + 1) * ns]);
    }
    StageValueTables {
        horizon,
        num_states: ns,
        num_actions: na,
        q,
        v,
    }
}

/// `V*_0(s)` for every `s`, using two rolling stage buffers instead of full tables.
pub fn optimal_start_values(mdp: &TabularMdp, horizon: usize) -> Vec<f64> {
    let (ns, na) = (mdp.num_states(), mdp.num_actions());
    let mut q = vec![0.0; ns * na];
    let mut v = vec![0.0; ns];
    terminal_q(mdp, &mut q);
    row_max(&q, na, &mut v);
    for _ in 0..horizon {
        bellman_backup(mdp, &v, &mut q);
        row_max(&q, na, &mut v);
    }
    v
}

/// Lookahead rewards `r^d_{s,a}` for depths `d = 1..=K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KStepRewardTable {
    k: usize,
    num_states: usize,
    num_actions: usize,
    /// Flat `[d-1][s][a]`.
    r: Vec<f64>,
}

impl KStepRewardTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    /// `r^d_{s,a}`, `1 <= d <= K`.
    pub fn get(&self, d: usize, s: usize, a: usize) -> f64 {
        self.row(d, s)[a]
    }

    pub fn row(&self, d: usize, s: usize) -> &[f64] {
        assert!(d >= 1 && d <= self.k, "depth {d} outside 1..={}", self.k);
        let start = ((d - 1) * self.num_states + s) * self.num_actions;
        &self.r[start..start + self.num_actions]
    }

    pub fn depth(&self, d: usize) -> &[f64] {
        assert!(d >= 1 && d <= self.k, "depth {d} outside 1..={}", self.k);
        let len = self.num_states * self.num_actions;
        &self.r[(d - 1) * len..d * len]
    }

    /// `a*_{s,d}`.
    pub fn best_action(&self, d: usize, s: usize) -> usize {
        argmax(self.row(d, s))
    }
}

/// `r^1 = R`, `r^d = R + P max_a' r^{d-1}`. Uses the same backup as
/// [`backward_induction`], so `r^d` equals `Q*_{T-d+1}` bit for bit.
pub fn k_step_rewards(mdp: &TabularMdp, k: usize) -> KStepRewardTable {
    assert!(k >= 1, "lookahead depth must be at least 1");
    let (ns, na) = (mdp.num_states(), mdp.num_actions());
    let len = ns * na;
    let mut r = vec![0.0; k * len];
    terminal_q(mdp, &mut r[..len]);
    let mut v = vec![0.0; ns];
    for d in 2..=k {
        let (done, rest) = r.split_at_mut((d - 1) * len);
        row_max(&done[(d - 2) * len..], na, &mut v);
        bellman_backup(mdp, &v, &mut rest[..len]);
    }
    KStepRewardTable {
        k,
        num_states: ns,
        num_actions: na,
        r,
    }
}
