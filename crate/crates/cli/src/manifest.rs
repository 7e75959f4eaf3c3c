use std::fs;
use std::path::{Path, PathBuf};

use adagcn::dataset::dataset_checksum;
use adagcn::harness::ExperimentSpec;
use adagcn::{generate_sbm, load_dataset, Dataset};
use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to repeat a run. Timestamps are informational and are
/// the only fields that change between identical runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Checksum of the dataset files; absent for generated fixtures.
    pub dataset_checksum: Option<String>,
    /// Fully resolved experiment with every default materialized.
    pub experiment: ExperimentSpec,
    pub seeds: Vec<u64>,
    pub jobs: usize,
    pub started_at: String,
    pub finished_at: String,
    pub completed_trials: usize,
    pub failed_trials: usize,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn start(
        command: &str,
        experiment: &ExperimentSpec,
        checksum: Option<String>,
        jobs: usize,
    ) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            dataset_checksum: checksum,
            seeds: experiment.seeds.clone(),
            experiment: experiment.clone(),
            jobs,
            started_at: now(),
            finished_at: String::new(),
            completed_trials: 0,
            failed_trials: 0,
            outputs: Vec::new(),
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read manifest {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid manifest {}", path.display()))
    }

    pub fn finish(mut self, dir: &Path, file_name: &str) -> anyhow::Result<()> {
        self.finished_at = now();
        self.outputs.sort();
        let path = dir.join(file_name);
        let text = serde_json::to_string_pretty(&self)?;
        fs::write(&path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
    }

    /// Fails when the dataset on disk no longer matches the recorded checksum.
    pub fn check_dataset(&self, current: Option<&str>) -> anyhow::Result<()> {
        if let (Some(expected), Some(actual)) = (&self.dataset_checksum, current) {
            if expected != actual {
                bail!("dataset changed since the manifest was written (checksum {actual}, manifest has {expected})");
            }
        }
        Ok(())
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Reads an experiment spec file.
pub fn read_spec(path: &Path) -> anyhow::Result<ExperimentSpec> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read spec {}", path.display()))?;
    ExperimentSpec::from_json(&text).with_context(|| format!("invalid spec {}", path.display()))
}

/// Loads the dataset the spec points at and returns it with its checksum.
/// Records the canonical directory back into the spec.
pub fn resolve_dataset(spec: &mut ExperimentSpec) -> anyhow::Result<(Dataset, Option<String>)> {
    match (&spec.dataset_dir, &spec.fixture) {
        (Some(dir), _) => {
            let dir: PathBuf = fs::canonicalize(dir).unwrap_or_else(|_| dir.clone());
            let dataset = load_dataset(&dir)
                .with_context(|| format!("cannot load dataset {}", dir.display()))?;
            let checksum = dataset_checksum(&dir)?;
            spec.dataset_dir = Some(dir);
            spec.fixture = None;
            Ok((dataset, Some(checksum)))
        }
        (None, Some(fixture)) => Ok((
            generate_sbm(fixture).context("cannot generate fixture")?,
            None,
        )),
        (None, None) => bail!("no dataset: pass --dataset or set dataset_dir in the spec"),
    }
}
