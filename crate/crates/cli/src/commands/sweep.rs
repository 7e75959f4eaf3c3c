use std::path::PathBuf;
use std::process::ExitCode;

use adagcn::harness::report::write_experiment;
use adagcn::harness::run_experiment;
use clap::Args;

use super::base_spec;
use crate::args::{parse_seeds, OutArgs, PrepArgs, SplitArgs};
use crate::manifest::{resolve_dataset, RunManifest, MANIFEST_FILE};

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Experiment spec JSON with models, sweep and seeds.
    #[arg(
        long,
        required_unless_present = "manifest",
        conflicts_with = "manifest"
    )]
    pub spec: Option<PathBuf>,
    /// Manifest of an earlier sweep to repeat.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Seeds as `0,1,2` or `0..10`.
    #[arg(long)]
    pub seeds: Option<String>,
    /// Worker threads for independent trials.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub split: SplitArgs,
    #[command(flatten)]
    pub prep: PrepArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

pub fn run(args: SweepArgs) -> anyhow::Result<ExitCode> {
    let (spec, previous) = base_spec(args.spec.as_deref(), args.manifest.as_deref())?;
    let mut spec = spec.normalized();
    args.split.apply(&mut spec);
    args.prep.apply(&mut spec);
    if let Some(dir) = args.dataset {
        spec.dataset_dir = Some(dir);
        spec.fixture = None;
    }
    if let Some(s) = &args.seeds {
        spec.seeds = parse_seeds(s)?;
    }
    let (dataset, checksum) = resolve_dataset(&mut spec)?;
    if let Some(m) = &previous {
        m.check_dataset(checksum.as_deref())?;
    }
    spec.validate()?;
    let jobs = args.jobs.max(1);
    let mut manifest = RunManifest::start("sweep", &spec, checksum, jobs);

    let result = run_experiment(&dataset, &spec, jobs)?;
    let out = &args.out.out;
    manifest.outputs = write_experiment(out, &result)?;
    manifest.completed_trials = result.outcomes.len();
    manifest.failed_trials = result.failures.len();
    manifest.finish(out, MANIFEST_FILE)?;

    println!(
        "{} sweep: {} trials, {} failed",
        result.summary.sweep,
        result.outcomes.len(),
        result.failures.len()
    );
    for row in &result.summary.rows {
        let p = &row.point;
        println!(
            "  {:<14} minority={:<3} M={:<3} epochs={:<4} noise={:<5} acc {:.4} ± {:.4} (n={})",
            row.model,
            p.n_minority,
            p.num_estimators,
            p.epochs,
            p.noise_fraction,
            row.mean_accuracy,
            row.std_accuracy,
            row.trials
        );
    }
    for f in &result.failures {
        eprintln!(
            "trial failed: seed {} model {}: {}",
            f.seed, f.model, f.message
        );
    }
    Ok(if result.is_complete() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}
