use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use adagcn::boosting::write_ensemble;
use adagcn::gcn::write_params;
use adagcn::harness::report::{
    save_confusion, save_history, save_round_diagnostics, save_round_history, save_weight_trace,
};
use adagcn::harness::{
    export_weight_traces, run_experiment, ModelKind, ModelSpec, SweepSpec, TrainedModel,
};
use anyhow::{bail, Context};
use clap::Args;

use super::{base_spec, write_json, MetricsFile};
use crate::args::{ModelArgs, OutArgs, PrepArgs, SplitArgs};
use crate::manifest::{resolve_dataset, RunManifest, MANIFEST_FILE};

pub const CHECKPOINT_FILE: &str = "model.ckpt";

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Dataset directory (edges.tsv, features, labels.csv, optional split.json).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Experiment spec JSON; its first model is trained.
    #[arg(long, conflicts_with = "manifest")]
    pub spec: Option<PathBuf>,
    /// Manifest of an earlier run to repeat.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub split: SplitArgs,
    #[command(flatten)]
    pub prep: PrepArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

pub fn run(args: TrainArgs) -> anyhow::Result<ExitCode> {
    let (mut spec, previous) = base_spec(args.spec.as_deref(), args.manifest.as_deref())?;
    let mut model = spec
        .model_list()
        .into_iter()
        .next()
        .unwrap_or_else(|| ModelSpec::new(ModelKind::Adagcn));
    args.model.apply(&mut model);
    args.split.apply(&mut spec);
    args.prep.apply(&mut spec);
    if let Some(dir) = args.dataset {
        spec.dataset_dir = Some(dir);
        spec.fixture = None;
    }
    let seed = args.seed.or(spec.seeds.first().copied()).unwrap_or(0);
    spec.model = None;
    spec.models = vec![model];
    spec.seeds = vec![seed];
    spec.sweep = SweepSpec::None;

    let (dataset, checksum) = resolve_dataset(&mut spec)?;
    if let Some(m) = &previous {
        m.check_dataset(checksum.as_deref())?;
    }
    spec.validate()?;
    let mut manifest = RunManifest::start("train", &spec, checksum, 1);

    let result = run_experiment(&dataset, &spec, 1)?;
    if let Some(f) = result.failures.first() {
        bail!("training failed for seed {}: {}", f.seed, f.message);
    }
    let outcome = &result.outcomes[0];
    let report = &outcome.report;

    let out = &args.out.out;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut outputs = vec![CHECKPOINT_FILE.to_owned()];
    let ckpt = out.join(CHECKPOINT_FILE);
    let mut w = BufWriter::new(
        File::create(&ckpt).with_context(|| format!("cannot create {}", ckpt.display()))?,
    );
    match &outcome.trained {
        TrainedModel::Single {
            params, history, ..
        } => {
            write_params(&mut w, params)?;
            save_history(&out.join("history.csv"), history)?;
        }
        TrainedModel::Ensemble(model) => {
            write_ensemble(&mut w, model)?;
            let diagnostics = outcome
                .diagnostics
                .as_ref()
                .expect("ensemble trials record diagnostics");
            save_round_history(&out.join("history.csv"), &diagnostics.rounds)?;
            save_round_diagnostics(&out.join("diagnostics.csv"), &diagnostics.rounds)?;
            save_weight_trace(
                &out.join("weight_trace.csv"),
                &export_weight_traces(diagnostics, None)?,
            )?;
            outputs.extend(["diagnostics.csv".into(), "weight_trace.csv".into()]);
        }
    }
    std::io::Write::flush(&mut w)?;
    outputs.push("history.csv".into());

    outcome.split.save(&out.join("split.json"))?;
    let confusion = format!("confusion_{seed}.csv");
    save_confusion(&out.join(&confusion), &report.metrics)?;
    write_json(
        &out.join("metrics.json"),
        &MetricsFile {
            model: &report.model,
            seed,
            split: "test",
            nodes: report.test_size,
            accuracy: report.metrics.accuracy,
            final_epoch_accuracy: Some(report.final_epoch_accuracy),
            majority_class: Some(report.majority_class),
            per_class_recall: &report.metrics.per_class_recall,
            confusion: &report.metrics.confusion,
        },
    )?;
    outputs.extend(["split.json".into(), confusion, "metrics.json".into()]);

    manifest.completed_trials = 1;
    manifest.outputs = outputs;
    manifest.finish(out, MANIFEST_FILE)?;
    println!(
        "{} seed {seed}: test accuracy {:.4} on {} nodes (majority class {}), outputs in {}",
        report.model,
        report.metrics.accuracy,
        report.test_size,
        report.majority_class,
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}
