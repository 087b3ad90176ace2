use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lookahead_rl::harness::presets::{preset, ABLATION_GAMMAS, PRESET_NAMES};
use lookahead_rl::harness::{
    aggregate, cached_oracles, instance_hash, run_experiment, write_atomic, AggregateReport,
    ExperimentConfig, SUMMARY_FILE,
};

#[derive(Parser)]
#[command(name = "lookahead-rl", version, about = "K-step lookahead thresholding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the configured instances and write them as JSON.
    Generate(Common),
    /// Compute oracle values (optimal, greedy, thresholding) per instance.
    Plan(Common),
    /// Run every agent on every instance and aggregate the results.
    Run(Common),
    /// Rebuild summary.csv and curves.csv from a result directory.
    Aggregate {
        /// Result directory; defaults to the config's output directory.
        dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the thresholding agents once per threshold.
    Ablate {
        #[command(flatten)]
        common: Common,
        /// Thresholds to sweep.
        #[arg(long, value_delimiter = ',', default_values_t = ABLATION_GAMMAS.to_vec())]
        gammas: Vec<f64>,
    },
}

#[derive(Args, Default)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named config.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
    preset: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Repetitions per instance.
    #[arg(long)]
    seeds: Option<usize>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

impl Common {
    fn is_empty(&self) -> bool {
        self.config.is_none() && self.preset.is_none()
    }

    fn load(&self) -> Result<ExperimentConfig> {
        let mut config = match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::load(path)
                .with_context(|| format!("cannot load config {}", path.display()))?,
            (None, Some(name)) => preset(name)?,
            (None, None) => bail!("one of --config or --preset is required"),
        };
        config.apply_env_overrides()?;
        if let Some(out) = &self.out {
            config.output = out.clone();
        }
        if let Some(seeds) = self.seeds {
            config.seeds.count = seeds;
        }
        if let Some(jobs) = self.jobs {
            config.jobs = Some(jobs);
        }
        config.validate()?;
        Ok(config)
    }
}

fn generate(config: &ExperimentConfig) -> Result<()> {
    let dir = config.output.join("instances");
    for i in 0..config.instance_count() {
        let mdp = config.build_instance(i)?;
        let path = dir.join(format!("i{i:04}.json"));
        write_atomic(&path, mdp.to_json()?.as_bytes())?;
        println!("{}\t{}", path.display(), instance_hash(&mdp)?);
    }
    Ok(())
}

fn fmt(value: Option<f64>) -> String {
    value.map_or_else(|| "-".into(), |v| format!("{v}"))
}

fn plan(config: &ExperimentConfig) -> Result<()> {
    println!("instance\toracle\tvalue\tcompetitive_ratio\tgap");
    for i in 0..config.instance_count() {
        let mdp = config.build_instance(i)?;
        let oracles = cached_oracles(config, &mdp, &config.output)?;
        println!("{i}\toptimal\t{}\t-\t-", fmt(oracles.optimal_value));
        for g in &oracles.greedy {
            println!(
                "{i}\tgreedy-K{}\t{}\t{}\t{}",
                g.k,
                g.value,
                fmt(g.competitive_ratio),
                fmt(g.gap)
            );
        }
        for t in &oracles.thresholding {
            println!("{i}\tthreshold-K{}\t{}\t-\t-", t.k, t.value);
        }
    }
    Ok(())
}

fn print_report(dir: &Path, report: &AggregateReport) {
    for row in report.summary.iter().filter(|r| r.metric == "cumulative_reward") {
        println!("{}\t{:.3} ± {:.3}\t(n={})", row.agent, row.mean, row.stderr, row.n);
    }
    for problem in &report.problems {
        eprintln!("warning: {problem}");
    }
    println!("wrote {}", dir.join(SUMMARY_FILE).display());
}

fn run(config: &ExperimentConfig) -> Result<()> {
    let manifest = run_experiment(config, &config.output)?;
    let report = aggregate(&config.output)?;
    print_report(&config.output, &report);
    if !manifest.failures.is_empty() {
        bail!("{} runs failed; see the manifest", manifest.failures.len());
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Generate(common) => generate(&common.load()?),
        Command::Plan(common) => plan(&common.load()?),
        Command::Run(common) => run(&common.load()?),
        Command::Aggregate { dir, common } => {
            let dir = match dir {
                Some(dir) => dir,
                None if !common.is_empty() => common.load()?.output,
                None => bail!("give a result directory or a config"),
            };
            let report = aggregate(&dir).with_context(|| format!("cannot aggregate {}", dir.display()))?;
            print_report(&dir, &report);
            Ok(())
        }
        Command::Ablate { common, gammas } => {
            if gammas.is_empty() {
                bail!("--gammas is empty");
            }
            let config = common.load()?.expand_thresholds(&gammas);
            config.validate()?;
            run(&config)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
