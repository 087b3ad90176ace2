use crate::planning::argmax;
use crate::rng::RngStream;

use super::ExplorationMode;

/// `g(t) = 3 ln t`.
pub fn exploration_fn(t: f64) -> f64 {
    3.0 * t.ln()
}

/// `sqrt(g(n + 2) / (n + 2))`.
pub fn confidence_width(n: u64) -> f64 {
    let m = (n + 2) as f64;
    (exploration_fn(m) / m).sqrt()
}

/// Fallback ranking index `r̂ + (3.4 / n) sqrt((ln ln n + ln(10 T)) / n)`.
///
/// Unvisited actions rank first (`+∞`); `ln ln n` is evaluated at `max(n, 3)`
/// because it is undefined or negative-infinite at `n = 1, 2`.
pub fn ucb_index(r_hat: f64, n: u64, horizon: usize) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    let nf = n as f64;
    let loglog = (n.max(3) as f64).ln().ln();
    let bonus = (3.4 / nf) * ((loglog + (10.0 * horizon as f64).ln()) / nf).sqrt();
    r_hat + bonus
}

/// Per-(s, a) statistics of the thresholding learners.
///
/// With lookahead `K = 1` the bound is `φ¹/n − w(n)`. With `K ≥ 2` it adds the
/// mean of the collected `(K−1)`-step continuation returns and subtracts a
/// second width: `φ¹/n + φᴷ⁻¹/n' − w(n) − w(n')`. Until every count it uses is
/// positive the bound is `−∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct LcbState {
    num_states: usize,
    num_actions: usize,
    k: usize,
    n: Vec<u64>,
    n_km1: Vec<u64>,
    phi1: Vec<f64>,
    phi_km1: Vec<f64>,
    lcb: Vec<f64>,
}

impl LcbState {
    pub fn new(num_states: usize, num_actions: usize, k: usize) -> Self {
        assert!(k >= 1, "lookahead depth must be at least 1");
        let len = num_states * num_actions;
        Self {
            num_states,
            num_actions,
            k,
            n: vec![0; len],
            n_km1: vec![0; len],
            phi1: vec![0.0; len],
            phi_km1: vec![0.0; len],
            lcb: vec![f64::NEG_INFINITY; len],
        }
    }

    /// Keep the one-step statistics, reset the continuation statistics and
    /// switch to lookahead `k`.
    pub fn with_depth(mut self, k: usize) -> Self {
        assert!(k >= 1, "lookahead depth must be at least 1");
        self.k = k;
        self.n_km1.iter_mut().for_each(|n| *n = 0);
        self.phi_km1.iter_mut().for_each(|p| *p = 0.0);
        for idx in 0..self.lcb.len() {
            self.refresh(idx);
        }
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn idx(&self, s: usize, a: usize) -> usize {
        s * self.num_actions + a
    }

    fn refresh(&mut self, idx: usize) {
        let n = self.n[idx];
        self.lcb[idx] = if n == 0 {
            f64::NEG_INFINITY
        } else if self.k == 1 {
            self.phi1[idx] / n as f64 - confidence_width(n)
        } else {
            let m = self.n_km1[idx];
            if m == 0 {
                f64::NEG_INFINITY
            } else {
                self.phi1[idx] / n as f64 + self.phi_km1[idx] / m as f64
                    - confidence_width(n)
                    - confidence_width(m)
            }
        };
    }

    /// Fold one observed reward into `(s, a)`.
    pub fn record_reward(&mut self, s: usize, a: usize, reward: f64) {
        let idx = self.idx(s, a);
        self.phi1[idx] += reward;
        self.n[idx] += 1;
        self.refresh(idx);
    }

    /// Fold one `(K−1)`-step continuation return into `(s, a)`.
    pub fn record_continuation(&mut self, s: usize, a: usize, total: f64) {
        let idx = self.idx(s, a);
        self.phi_km1[idx] += total;
        self.n_km1[idx] += 1;
        self.refresh(idx);
    }

    pub fn lcb(&self, s: usize, a: usize) -> f64 {
        self.lcb[self.idx(s, a)]
    }

    pub fn lcb_row(&self, s: usize) -> &[f64] {
        &self.lcb[s * self.num_actions..(s + 1) * self.num_actions]
    }

    pub fn count(&self, s: usize, a: usize) -> u64 {
        self.n[self.idx(s, a)]
    }

    pub fn count_row(&self, s: usize) -> &[u64] {
        &self.n[s * self.num_actions..(s + 1) * self.num_actions]
    }

    pub fn continuation_count(&self, s: usize, a: usize) -> u64 {
        self.n_km1[self.idx(s, a)]
    }

    pub fn reward_sum(&self, s: usize, a: usize) -> f64 {
        self.phi1[self.idx(s, a)]
    }

    pub fn continuation_sum(&self, s: usize, a: usize) -> f64 {
        self.phi_km1[self.idx(s, a)]
    }

    /// Point estimate of the lookahead reward: one-step mean plus, for
    /// `K ≥ 2`, the continuation mean once one exists.
    pub fn estimate(&self, s: usize, a: usize) -> f64 {
        let idx = self.idx(s, a);
        let n = self.n[idx];
        if n == 0 {
            return 0.0;
        }
        let mut r = self.phi1[idx] / n as f64;
        if self.k > 1 && self.n_km1[idx] > 0 {
            r += self.phi_km1[idx] / self.n_km1[idx] as f64;
        }
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub action: usize,
    /// The action came from the certified set `{a : LCB ≥ γ}`.
    pub certified: bool,
}

/// One thresholding decision at state `s`: the highest-LCB member of
/// `{a : LCB_{s,a} ≥ γ}` if that set is nonempty, otherwise a fallback pick
/// according to `mode`. Ties go to the lowest action index. Uniform fallback
/// consumes one draw; the index fallback consumes none.
pub fn select_thresholded(
    stats: &LcbState,
    s: usize,
    gamma: f64,
    mode: ExplorationMode,
    horizon: usize,
    rng: &mut RngStream,
) -> Selection {
    let lcb = stats.lcb_row(s);
    let mut best: Option<usize> = None;
    for (a, &value) in lcb.iter().enumerate() {
        if value >= gamma && best.is_none_or(|b| value > lcb[b]) {
            best = Some(a);
        }
    }
    if let Some(action) = best {
        return Selection {
            action,
            certified: true,
        };
    }
    let action = match mode {
        ExplorationMode::Uniform => rng.index(stats.num_actions()),
        ExplorationMode::UcbIndex => {
            let indices: Vec<f64> = (0..stats.num_actions())
                .map(|a| ucb_index(stats.estimate(s, a), stats.count(s, a), horizon))
                .collect();
            argmax(&indices)
        }
    };
    Selection {
        action,
        certified: false,
    }
}
