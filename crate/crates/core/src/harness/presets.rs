//! Named experiment configs reproducing the paper's figures.

use super::config::{Algorithm, AgentConfig, EnvironmentSpec, ExperimentConfig};
use crate::envs::SyntheticMdpParams;
use crate::error::{Error, Result};

pub const PRESET_NAMES: &[&str] = &[
    "fig1-left",
    "fig1-left-1000",
    "fig1-right",
    "riverswim-5",
    "riverswim-8",
    "riverswim-15",
    "frozenlake",
    "ablation",
];

/// Thresholds swept by `ablate` and the `ablation` preset.
pub const ABLATION_GAMMAS: &[f64] = &[0.1, 0.3, 0.5, 0.9];

fn baselines() -> Vec<AgentConfig> {
    let q = |h: usize| AgentConfig {
        episode_len: Some(h),
        ..AgentConfig::new(Algorithm::QEpisodic)
    };
    let opt_q = |d: f64| AgentConfig {
        discount: Some(d),
        ..AgentConfig::new(Algorithm::OptimisticQ)
    };
    vec![
        AgentConfig::new(Algorithm::Ucrl2),
        opt_q(0.9),
        opt_q(0.99),
        q(1),
        q(10),
        AgentConfig::new(Algorithm::Uniform),
    ]
}

fn lookahead(t_c_hybrid: usize) -> Vec<AgentConfig> {
    vec![
        AgentConfig::new(Algorithm::Lg1t).with_gamma(0.3),
        AgentConfig::new(Algorithm::Lgkt).with_gamma(0.9),
        AgentConfig {
            t_c: Some(t_c_hybrid),
            ..AgentConfig::new(Algorithm::Lg12t)
        },
    ]
}

fn synthetic(num_states: usize, num_actions: usize, params: SyntheticMdpParams) -> EnvironmentSpec {
    EnvironmentSpec::Synthetic {
        num_states,
        num_actions,
        params,
    }
}

fn with_all(env: EnvironmentSpec, t_c_hybrid: usize) -> ExperimentConfig {
    let mut agents = lookahead(t_c_hybrid);
    agents.push(AgentConfig::new(Algorithm::Lg1tRl));
    agents.extend(baselines());
    ExperimentConfig::new(env, agents)
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let mut config = match name {
        "fig1-left" | "fig1-left-1000" => {
            let mut c = with_all(synthetic(10, 5, SyntheticMdpParams::small()), 100);
            c.instances = if name == "fig1-left" { 200 } else { 1000 };
            c.keep_traces = false;
            c
        }
        "fig1-right" => {
            let mut c = with_all(synthetic(100, 25, SyntheticMdpParams::large()), 100);
            c.instances = 200;
            c.keep_traces = false;
            c
        }
        "riverswim-5" | "riverswim-8" | "riverswim-15" => {
            let states: usize = name["riverswim-".len()..].parse().expect("preset name");
            let mut c = with_all(EnvironmentSpec::JumpRiverSwim { max_index: states - 1 }, 100);
            c.seeds.count = 100;
            c
        }
        "frozenlake" => {
            let mut c = with_all(EnvironmentSpec::FrozenLake4x4, 10_000);
            c.seeds.count = 100;
            c
        }
        "ablation" => {
            let mut c = ExperimentConfig::new(synthetic(10, 5, SyntheticMdpParams::small()), lookahead(100))
                .expand_thresholds(ABLATION_GAMMAS);
            c.instances = 200;
            c.keep_traces = false;
            c
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset `{other}`; expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    config.name = Some(name.into());
    config.output = format!("results/{name}").into();
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for name in PRESET_NAMES {
            let config = preset(name).unwrap();
            config.validate().unwrap();
            assert_eq!(config.horizon, 20_000);
        }
        assert!(preset("fig9").is_err());
    }

    #[test]
    fn preset_shapes() {
        assert_eq!(preset("fig1-left").unwrap().agents.len(), 10);
        assert_eq!(preset("fig1-left").unwrap().instance_count(), 200);
        assert_eq!(preset("riverswim-8").unwrap().build_instance(0).unwrap().num_states(), 8);
        assert_eq!(preset("ablation").unwrap().agents.len(), 12);
        let frozen = preset("frozenlake").unwrap();
        assert!(frozen.agents.iter().any(|a| a.label() == "LG1-2T[tc=10000]"));
    }
}
