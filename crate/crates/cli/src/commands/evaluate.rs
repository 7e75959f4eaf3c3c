use std::fs::{self, File};
use std::io::{BufReader, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use adagcn::boosting::{read_ensemble, ENSEMBLE_MAGIC};
use adagcn::gcn::{read_params, PARAMS_MAGIC};
use adagcn::harness::report::save_confusion;
use adagcn::harness::{evaluate, trial_features};
use adagcn::{ensemble_predict, normalize_adjacency, predict, NodeSplit};
use anyhow::{bail, Context};
use clap::Args;

use super::{base_spec, write_json, MetricsFile};
use crate::args::{EvalSplit, OutArgs, PrepArgs};
use crate::manifest::{resolve_dataset, RunManifest};

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Parameter or ensemble checkpoint written by `train`.
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Training manifest; supplies the dataset, preprocessing and seed.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Split file; defaults to split.json next to the checkpoint, then the
    /// dataset's own split.json.
    #[arg(long)]
    pub split_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "test")]
    pub split: EvalSplit,
    /// Seed of the feature perturbation (only matters with --noise).
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub prep: PrepArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

enum Checkpoint {
    Single(adagcn::GcnParams),
    Ensemble(adagcn::EnsembleModel),
}

fn read_checkpoint(path: &PathBuf) -> anyhow::Result<Checkpoint> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|f| BufReader::new(f).read_to_end(&mut bytes))
        .with_context(|| format!("cannot read checkpoint {}", path.display()))?;
    let ctx = || format!("bad checkpoint {}", path.display());
    match bytes.get(..4) {
        Some(m) if m == PARAMS_MAGIC => Ok(Checkpoint::Single(
            read_params(&mut bytes.as_slice()).with_context(ctx)?,
        )),
        Some(m) if m == ENSEMBLE_MAGIC => Ok(Checkpoint::Ensemble(
            read_ensemble(&mut bytes.as_slice()).with_context(ctx)?,
        )),
        _ => bail!("{} is not a checkpoint (unknown magic)", path.display()),
    }
}

pub fn run(args: EvaluateArgs) -> anyhow::Result<ExitCode> {
    let (mut spec, _) = base_spec(None, args.manifest.as_deref())?;
    args.prep.apply(&mut spec);
    if let Some(dir) = args.dataset {
        spec.dataset_dir = Some(dir);
        spec.fixture = None;
    }
    let seed = args.seed.or(spec.seeds.first().copied()).unwrap_or(0);
    let (dataset, checksum) = resolve_dataset(&mut spec)?;
    spec.seeds = vec![seed];

    let split_path = match args.split_file {
        Some(p) => Some(p),
        None => args
            .checkpoint
            .parent()
            .map(|d| d.join("split.json"))
            .filter(|p| p.is_file()),
    };
    let split = match split_path {
        Some(p) => NodeSplit::load(&p)?,
        None => dataset
            .split
            .clone()
            .context("no split: pass --split-file or keep split.json next to the checkpoint")?,
    };
    split.validate(&dataset.labels)?;
    let nodes = match args.split {
        EvalSplit::Train => &split.train,
        EvalSplit::Val => &split.val,
        EvalSplit::Test => &split.test,
    };

    let features = trial_features(&dataset, &spec.preprocess, spec.noise_fraction, seed)?;
    let a_hat = normalize_adjacency(&dataset.graph, spec.preprocess.self_loops);
    let checkpoint = read_checkpoint(&args.checkpoint)?;
    let (f, c) = match &checkpoint {
        Checkpoint::Single(p) => (p.num_features(), p.num_classes()),
        Checkpoint::Ensemble(m) => (m.members[0].params.num_features(), m.num_classes),
    };
    if f != dataset.num_features() || c != dataset.num_classes() {
        bail!(
            "dimension mismatch: checkpoint expects {f} features and {c} classes, dataset has {} and {}",
            dataset.num_features(),
            dataset.num_classes()
        );
    }
    let predicted = match &checkpoint {
        Checkpoint::Single(p) => predict(&a_hat, &features, p)?.argmax(),
        Checkpoint::Ensemble(m) => ensemble_predict(m, &a_hat, &features)?.0,
    };
    let metrics = evaluate(&predicted, &dataset.labels, nodes)?;

    let out = &args.out.out;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let name = args.split.name();
    let metrics_file = format!("metrics_{name}.json");
    let confusion_file = format!("confusion_{name}.csv");
    write_json(
        &out.join(&metrics_file),
        &MetricsFile {
            model: &args.checkpoint.display().to_string(),
            seed,
            split: name,
            nodes: nodes.len(),
            accuracy: metrics.accuracy,
            final_epoch_accuracy: None,
            majority_class: None,
            per_class_recall: &metrics.per_class_recall,
            confusion: &metrics.confusion,
        },
    )?;
    save_confusion(&out.join(&confusion_file), &metrics)?;

    let mut manifest = RunManifest::start("evaluate", &spec, checksum, 1);
    manifest.completed_trials = 1;
    manifest.outputs = vec![metrics_file, confusion_file];
    manifest.finish(out, "evaluate_manifest.json")?;
    println!(
        "{name} accuracy {:.4} on {} nodes",
        metrics.accuracy,
        nodes.len()
    );
    Ok(ExitCode::SUCCESS)
}
