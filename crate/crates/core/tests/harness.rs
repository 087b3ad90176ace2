use std::fs;
use std::path::Path;

use approx::assert_abs_diff_eq;
use lookahead_rl::envs::SyntheticMdpParams;
use lookahead_rl::harness::{
    aggregate, read_trace, run_experiment, AgentConfig, Algorithm, EnvironmentSpec, ExperimentConfig,
    CURVES_FILE, MAX_CURVE_POINTS, SUMMARY_FILE,
};
use lookahead_rl::metrics::mean_stderr;

fn small_synthetic(agents: Vec<AgentConfig>) -> ExperimentConfig {
    let mut config = ExperimentConfig::new(
        EnvironmentSpec::Synthetic {
            num_states: 4,
            num_actions: 3,
            params: SyntheticMdpParams::small(),
        },
        agents,
    );
    config.horizon = 500;
    config
}

fn summary_value(dir: &Path, agent: &str, metric: &str) -> (f64, f64, usize) {
    let mut reader = csv::Reader::from_path(dir.join(SUMMARY_FILE)).unwrap();
    for row in reader.records() {
        let row = row.unwrap();
        if &row[1] == agent && &row[2] == metric {
            return (row[3].parse().unwrap(), row[4].parse().unwrap(), row[5].parse().unwrap());
        }
    }
    panic!("no {agent}/{metric} row");
}

#[test]
fn one_instance_three_seeds_gives_three_records_and_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_synthetic(vec![AgentConfig::new(Algorithm::Lg1t)]);
    config.seeds.count = 3;
    let manifest = run_experiment(&config, dir.path()).unwrap();
    assert_eq!(manifest.runs.len(), 3);
    assert!(manifest.failures.is_empty());
    for run in &manifest.runs {
        assert!(dir.path().join(run.trace.as_ref().unwrap()).exists());
    }
    let report = aggregate(dir.path()).unwrap();
    let rows: Vec<_> = report
        .summary
        .iter()
        .filter(|r| r.agent == "LG1T[g=0.3]" && r.metric == "cumulative_reward")
        .collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].n, 3);
    assert!(report.problems.is_empty());
}

#[test]
fn rerun_is_byte_identical_and_schedule_independent() {
    let mut config = small_synthetic(vec![
        AgentConfig::new(Algorithm::Lg1t),
        AgentConfig::new(Algorithm::Lgkt),
        AgentConfig::new(Algorithm::Lg12t),
        AgentConfig::new(Algorithm::Ucrl2),
    ]);
    config.instances = 3;
    config.seeds.count = 2;
    let mut outputs = Vec::new();
    for jobs in [1, 4, 4] {
        let dir = tempfile::tempdir().unwrap();
        config.jobs = Some(jobs);
        run_experiment(&config, dir.path()).unwrap();
        aggregate(dir.path()).unwrap();
        outputs.push((
            fs::read(dir.path().join(SUMMARY_FILE)).unwrap(),
            fs::read(dir.path().join(CURVES_FILE)).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn aggregate_matches_recomputation_from_traces() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_synthetic(vec![AgentConfig::new(Algorithm::Lg1t), AgentConfig::new(Algorithm::Uniform)]);
    config.instances = 2;
    config.seeds.count = 3;
    let manifest = run_experiment(&config, dir.path()).unwrap();
    aggregate(dir.path()).unwrap();
    for agent in ["LG1T[g=0.3]", "Uniform"] {
        let totals: Vec<f64> = manifest
            .runs
            .iter()
            .filter(|r| r.agent == agent)
            .map(|r| {
                let record = read_trace(&dir.path().join(r.trace.as_ref().unwrap())).unwrap();
                assert_eq!(record.steps.len(), config.horizon + 1);
                record.steps.iter().map(|s| s.reward).sum::<f64>()
            })
            .collect();
        assert_eq!(totals.len(), 6);
        let n = totals.len() as f64;
        let mean = totals.iter().sum::<f64>() / n;
        let var = totals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let (m, se, count) = summary_value(dir.path(), agent, "cumulative_reward");
        assert_eq!(count, 6);
        assert_abs_diff_eq!(m, mean, epsilon = 1e-9 * mean.abs().max(1.0));
        assert_abs_diff_eq!(se, (var / n).sqrt(), epsilon = 1e-9);
        let (avg, _, _) = summary_value(dir.path(), agent, "final_running_average");
        assert_abs_diff_eq!(avg, mean / (config.horizon + 1) as f64, epsilon = 1e-9);
    }
}

#[test]
fn single_run_and_identical_runs_have_zero_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        horizon: 300,
        ..ExperimentConfig::new(EnvironmentSpec::FrozenLake4x4, vec![AgentConfig::new(Algorithm::Lg1t)])
    };
    let manifest = run_experiment(&config, dir.path()).unwrap();
    let report = aggregate(dir.path()).unwrap();
    let trace = read_trace(&dir.path().join(manifest.runs[0].trace.as_ref().unwrap())).unwrap();
    let total: f64 = trace.steps.iter().map(|s| s.reward).sum();
    let row = report.summary.iter().find(|r| r.metric == "cumulative_reward").unwrap();
    assert_eq!((row.mean, row.stderr, row.n), (total, 0.0, 1));

    // Two copies of the same run.
    let mut twin = config.clone();
    twin.agents = vec![AgentConfig::new(Algorithm::Uniform)];
    twin.seeds.count = 1;
    let dir2 = tempfile::tempdir().unwrap();
    let mut manifest = run_experiment(&twin, dir2.path()).unwrap();
    let mut copy = manifest.runs[0].clone();
    copy.rep = 1;
    manifest.runs.push(copy);
    let report = lookahead_rl::harness::aggregate_manifest(&manifest, dir2.path());
    let row = report.summary.iter().find(|r| r.metric == "cumulative_reward").unwrap();
    assert_eq!((row.stderr, row.n), (0.0, 2));
}

#[test]
fn missing_and_corrupt_runs_are_listed_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_synthetic(vec![AgentConfig::new(Algorithm::Lg1t)]);
    config.seeds.count = 3;
    let manifest = run_experiment(&config, dir.path()).unwrap();
    fs::remove_file(dir.path().join(&manifest.runs[0].metrics)).unwrap();
    fs::write(dir.path().join(&manifest.runs[1].metrics), "{ not json").unwrap();
    let report = aggregate(dir.path()).unwrap();
    assert_eq!(report.problems.len(), 2);
    let row = report.summary.iter().find(|r| r.metric == "cumulative_reward").unwrap();
    assert_eq!(row.n, 1);
}

#[test]
fn curves_are_subsampled() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        horizon: 5000,
        keep_traces: false,
        ..ExperimentConfig::new(
            EnvironmentSpec::JumpRiverSwim { max_index: 4 },
            vec![AgentConfig::new(Algorithm::Lg1t)],
        )
    };
    let manifest = run_experiment(&config, dir.path()).unwrap();
    assert!(manifest.runs[0].trace.is_none());
    let report = aggregate(dir.path()).unwrap();
    assert_eq!(report.curves.len(), MAX_CURVE_POINTS);
    assert_eq!(report.curves.first().unwrap().t, 0);
    assert_eq!(report.curves.last().unwrap().t, 5000);
    let header = fs::read_to_string(dir.path().join(CURVES_FILE)).unwrap();
    assert!(header.starts_with("environment,agent,t,mean,stderr\n"));
    let summary = fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap();
    assert!(summary.starts_with("environment,agent,metric,mean,stderr,n\n"));
}

#[test]
fn oracles_are_cached_by_content() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_synthetic(vec![AgentConfig::new(Algorithm::Uniform)]);
    config.instances = 2;
    let first = run_experiment(&config, dir.path()).unwrap();
    let cached = fs::read_dir(dir.path().join("oracles")).unwrap().count();
    assert_eq!(cached, 2);
    let second = run_experiment(&config, dir.path()).unwrap();
    assert_eq!(first.instances, second.instances);
    let mean = mean_stderr(
        &first
            .instances
            .iter()
            .map(|i| i.oracles.greedy[0].competitive_ratio.unwrap())
            .collect::<Vec<_>>(),
    )
    .0;
    assert!(mean > 0.0 && mean <= 1.0 + 1e-12);
}

#[test]
fn failing_instance_is_isolated() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig::new(
        EnvironmentSpec::File {
            path: dir.path().join("missing.json"),
        },
        vec![AgentConfig::new(Algorithm::Lg1t)],
    );
    assert!(run_experiment(&config, dir.path()).is_err());
}
