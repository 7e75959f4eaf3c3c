pub mod check;
pub mod evaluate;
pub mod fixture;
pub mod sweep;
pub mod train;

use std::fs;
use std::path::Path;

use adagcn::harness::ExperimentSpec;
use anyhow::Context;
use serde::Serialize;

use crate::manifest::{read_spec, RunManifest};

#[derive(Serialize)]
pub struct MetricsFile<'a> {
    pub model: &'a str,
    pub seed: u64,
    pub split: &'a str,
    pub nodes: usize,
    pub accuracy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_epoch_accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub majority_class: Option<usize>,
    /// NaN (serialized as null) for classes absent from the split.
    pub per_class_recall: &'a [f64],
    pub confusion: &'a [Vec<usize>],
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}

/// Starting spec: a manifest's resolved experiment, a spec file, or defaults.
pub fn base_spec(
    spec: Option<&Path>,
    manifest: Option<&Path>,
) -> anyhow::Result<(ExperimentSpec, Option<RunManifest>)> {
    if let Some(path) = manifest {
        let m = RunManifest::load(path)?;
        return Ok((m.experiment.clone(), Some(m)));
    }
    match spec {
        Some(path) => Ok((read_spec(path)?, None)),
        None => Ok((ExperimentSpec::default(), None)),
    }
}
