use lookahead_rl::agents::baselines::{Ucrl2, Ucrl2Config, UniformRandom};
use lookahead_rl::agents::{
    Agent, ExplorationMode, Lg12t, Lg1t, Lg1tConfig, Lgkt, LgktConfig, Transition,
};
use lookahead_rl::envs::{gen_synthetic_mdp, jump_riverswim, SyntheticMdpParams};
use lookahead_rl::harness::simulate;
use lookahead_rl::metrics::mean_stderr;
use lookahead_rl::planning::k_step_rewards;
use lookahead_rl::rng::{split_seed, RngStream};
use lookahead_rl::{RewardNoise, TabularMdp};
use rayon::prelude::*;

fn three_state() -> TabularMdp {
    let r = [[0.6, 0.2], [0.3, 0.9], [0.5, 0.4]];
    let rows = [
        [[0.2, 0.5, 0.3], [0.6, 0.2, 0.2]],
        [[0.3, 0.3, 0.4], [0.1, 0.7, 0.2]],
        [[0.5, 0.25, 0.25], [0.2, 0.3, 0.5]],
    ];
    TabularMdp::from_fn(3, 2, |a, s, n| rows[s][a][n], |s, a| r[s][a], RewardNoise::Gaussian { variance: 0.1 })
        .unwrap()
}

fn step(mdp: &TabularMdp, agent: &mut dyn Agent, state: usize, t: usize, env: &mut RngStream) -> usize {
    let action = agent.select_action(state, t);
    let reward = mdp.sample_reward(state, action, env);
    let next_state = mdp.sample_transition(state, action, env);
    agent.observe(&Transition {
        t,
        state,
        action,
        reward,
        next_state,
    });
    next_state
}

#[test]
fn two_step_lcb_rarely_exceeds_target() {
    let mdp = three_state();
    let table = k_step_rewards(&mdp, 2);
    let horizon = 5000;
    let counts: Vec<(u64, u64)> = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let mut agent = Lgkt::new(3, 2, LgktConfig::new(2, 1.0, horizon), RngStream::derive(seed, 1));
            let mut env = RngStream::new(split_seed(seed, 0));
            let (mut events, mut above) = (0, 0);
            let mut state = 0;
            for t in 0..=horizon {
                state = step(&mdp, &mut agent, state, t, &mut env);
                for s in 0..3 {
                    for a in 0..2 {
                        let lcb = agent.stats().lcb(s, a);
                        if lcb.is_finite() {
                            events += 1;
                            above += u64::from(lcb > table.get(2, s, a));
                        }
                    }
                }
            }
            (events, above)
        })
        .collect();
    let events: u64 = counts.iter().map(|c| c.0).sum();
    let above: u64 = counts.iter().map(|c| c.1).sum();
    assert!(events > 1_000_000);
    assert!(above as f64 <= 0.05 * events as f64, "{above} of {events}");
}

#[test]
fn bad_arm_plays_do_not_grow_with_horizon() {
    let means = [0.5, 0.1, 0.15, 0.2, 0.05];
    let mdp = TabularMdp::from_fn(1, 5, |_, _, _| 1.0, |_, a| means[a], RewardNoise::Gaussian { variance: 0.25 })
        .unwrap();
    let bad_plays = |horizon: usize| {
        let plays: Vec<f64> = (0..200u64)
            .into_par_iter()
            .map(|seed| {
                let config = Lg1tConfig {
                    gamma: 0.3.into(),
                    exploration: ExplorationMode::Uniform,
                    horizon,
                };
                let mut agent = Lg1t::new(1, 5, config, RngStream::derive(seed, 1));
                let steps = simulate(&mdp, &mut agent, horizon, &mut RngStream::new(split_seed(seed, 0)));
                steps.iter().filter(|s| s.action != 0).count() as f64
            })
            .collect();
        mean_stderr(&plays).0
    };
    let (short, long) = (bad_plays(20_000), bad_plays(40_000));
    assert!(short > 0.0);
    assert!((long - short).abs() <= 0.1 * short, "{short} vs {long}");
}

#[test]
fn hybrid_matches_pure_lg2t_on_large_synthetic_suite() {
    let horizon = 20_000;
    let params = SyntheticMdpParams::large();
    let diffs: Vec<f64> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let seed = split_seed(77, i);
            let mdp = gen_synthetic_mdp(100, 25, &params, &mut RngStream::new(split_seed(seed, 0))).unwrap();
            let tail = LgktConfig::new(2, 0.9, horizon);
            let head = Lg1tConfig {
                gamma: 0.3.into(),
                exploration: ExplorationMode::UcbIndex,
                horizon,
            };
            let run = |agent: &mut dyn Agent| {
                let steps = simulate(&mdp, agent, horizon, &mut RngStream::new(split_seed(seed, 1)));
                steps.iter().map(|s| s.reward).sum::<f64>() / (horizon + 1) as f64
            };
            let hybrid = run(&mut Lg12t::new(100, 25, head, tail.clone(), 100, RngStream::derive(seed, 2)));
            let pure = run(&mut Lgkt::new(100, 25, tail, RngStream::derive(seed, 2)));
            hybrid - pure
        })
        .collect();
    let (mean, se) = mean_stderr(&diffs);
    assert!(mean + 2.0 * se >= 0.0, "hybrid - pure = {mean} ± {se}");
}

#[test]
#[ignore = "UCRL2 with the standard confidence radii is still exploring on JumpRiverSwim at T = 20000; its late average stays near the uniform policy's, not 1.5x above it"]
fn ucrl2_beats_uniform_late_on_riverswim() {
    let mdp = jump_riverswim(4);
    let horizon = 20_000;
    let late = |build: &(dyn Fn(u64) -> Box<dyn Agent> + Sync)| {
        let values: Vec<f64> = (0..100u64)
            .into_par_iter()
            .map(|seed| {
                let mut agent = build(seed);
                let steps = simulate(&mdp, agent.as_mut(), horizon, &mut RngStream::new(split_seed(seed, 0)));
                let tail = &steps[15_001..];
                tail.iter().map(|s| s.reward).sum::<f64>() / tail.len() as f64
            })
            .collect();
        mean_stderr(&values).0
    };
    let ucrl2 = late(&|_| Box::new(Ucrl2::new(5, 2, Ucrl2Config::default())));
    let uniform = late(&|seed| Box::new(UniformRandom::new(2, RngStream::derive(seed, 1))));
    assert!(ucrl2 >= 1.5 * uniform, "UCRL2 {ucrl2} vs uniform {uniform}");
}
