use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boosting::{
    ensemble_predict, train_adagcn, BoostDiagnostics, EnsembleModel, SampleWeights,
};
use crate::dataset::{perturb_features, row_normalize_features, Dataset, NodeSplit};
use crate::error::{Error, Result};
use crate::gcn::{predict, train_gcn, EpochRecord, GcnParams};
use crate::graph::{normalize_adjacency, SparseGraph};
use crate::matrix::Matrix;
use crate::rng::{derive_seed, rng_from_seed, stream};
use crate::split::make_imbalanced_split;

use super::metrics::{evaluate, Metrics};
use super::spec::{ExperimentSpec, ModelKind, ModelSpec, Preprocess, SplitProtocol, SweepSpec};

/// Sweep coordinates of one trial. Every field is recorded in its report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialPoint {
    pub n_minority: usize,
    pub num_estimators: usize,
    pub epochs: usize,
    pub noise_fraction: f64,
}

impl TrialPoint {
    fn same_as(&self, other: &Self) -> bool {
        self.n_minority == other.n_minority
            && self.num_estimators == other.num_estimators
            && self.epochs == other.epochs
            && self.noise_fraction.to_bits() == other.noise_fraction.to_bits()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub seed: u64,
    pub model: String,
    pub kind: ModelKind,
    pub majority_class: usize,
    pub n_majority: usize,
    #[serde(flatten)]
    pub point: TrialPoint,
    pub train_size: usize,
    pub test_size: usize,
    pub metrics: Metrics,
    /// Accuracy of the last-epoch parameters instead of the selected ones.
    pub final_epoch_accuracy: f64,
}

/// A finished trial with the artifacts needed for follow-up reports.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub report: TrialReport,
    pub split: NodeSplit,
    pub predictions: Vec<usize>,
    /// Present for ensemble models.
    pub diagnostics: Option<BoostDiagnostics>,
    pub trained: TrainedModel,
}

#[derive(Clone, Debug)]
pub enum TrainedModel {
    Single {
        params: GcnParams,
        history: Vec<EpochRecord>,
        selected_epoch: usize,
    },
    Ensemble(EnsembleModel),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub seed: u64,
    pub model: String,
    pub point: TrialPoint,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub model: String,
    #[serde(flatten)]
    pub point: TrialPoint,
    pub mean_accuracy: f64,
    /// Sample standard deviation; 0 for single-trial groups.
    pub std_accuracy: f64,
    pub trials: usize,
    pub single_trial: bool,
}

/// Per-group accuracy aggregates in spec order (model, then sweep point).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub sweep: String,
    pub rows: Vec<SummaryRow>,
}

impl SweepSummary {
    pub fn find(&self, model: &str, pred: impl Fn(&TrialPoint) -> bool) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.model == model && pred(&r.point))
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub sweep: SweepSpec,
    /// Sorted by seed, then sweep point, then model order.
    pub outcomes: Vec<TrialOutcome>,
    pub failures: Vec<TrialFailure>,
    pub summary: SweepSummary,
}

impl ExperimentResult {
    pub fn reports(&self) -> impl Iterator<Item = &TrialReport> {
        self.outcomes.iter().map(|o| &o.report)
    }

    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Sample mean and sample standard deviation (`n − 1`). A single value
/// has standard deviation 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Majority class for `seed`: the pinned one, or a uniform draw from its own
/// stream so it does not depend on the model axis.
pub fn majority_class_for(protocol: &SplitProtocol, seed: u64, num_classes: usize) -> usize {
    protocol.majority_class.unwrap_or_else(|| {
        rng_from_seed(derive_seed(seed, stream::MAJORITY)).random_range(0..num_classes)
    })
}

/// Split drawn for `seed`. Depends only on the dataset, the protocol and the
/// seed, never on the model.
pub fn split_for(
    dataset: &Dataset,
    protocol: &SplitProtocol,
    n_minority: usize,
    seed: u64,
) -> Result<(usize, NodeSplit)> {
    let majority = majority_class_for(protocol, seed, dataset.num_classes());
    if protocol.use_dataset_split {
        let split = dataset
            .split
            .clone()
            .ok_or_else(|| Error::InvalidParameter("dataset has no split file to use".into()))?;
        return Ok((majority, split));
    }
    let split = make_imbalanced_split(
        &dataset.labels,
        &protocol.imbalance(majority, n_minority),
        dataset.split.as_ref(),
        derive_seed(seed, stream::SPLIT),
    )?;
    Ok((majority, split))
}

fn points_for(spec: &ExperimentSpec, model: &ModelSpec) -> Vec<TrialPoint> {
    let base = TrialPoint {
        n_minority: spec.split.n_minority,
        num_estimators: model.effective_estimators(),
        epochs: model.train.epochs,
        noise_fraction: spec.noise_fraction,
    };
    let mut points: Vec<TrialPoint> = match &spec.sweep {
        SweepSpec::None => vec![base],
        SweepSpec::MinorityCount { values } => values
            .iter()
            .map(|&n| TrialPoint {
                n_minority: n,
                ..base
            })
            .collect(),
        SweepSpec::FeatureNoise { values } => values
            .iter()
            .map(|&f| TrialPoint {
                noise_fraction: f,
                ..base
            })
            .collect(),
        SweepSpec::Estimators {
            m_values,
            epochs_values,
        } => m_values
            .iter()
            .flat_map(|&m| {
                epochs_values.iter().map(move |&e| TrialPoint {
                    num_estimators: if model.kind.is_ensemble() { m } else { 1 },
                    epochs: e,
                    ..base
                })
            })
            .collect(),
    };
    let mut unique: Vec<TrialPoint> = Vec::with_capacity(points.len());
    for p in points.drain(..) {
        if !unique.iter().any(|u| u.same_as(&p)) {
            unique.push(p);
        }
    }
    unique
}

/// Model input for `seed`: features with `noise_fraction` of each row's
/// nonzeros removed, then optionally row-normalized.
pub fn trial_features(
    dataset: &Dataset,
    preprocess: &Preprocess,
    noise_fraction: f64,
    seed: u64,
) -> Result<Matrix> {
    let features = perturb_features(
        &dataset.features,
        noise_fraction,
        derive_seed(seed, stream::NOISE),
    )?;
    Ok(if preprocess.row_normalize {
        row_normalize_features(&features)
    } else {
        features
    })
}

struct Job {
    seed: u64,
    model: usize,
    point: TrialPoint,
}

/// One trial: split, perturb, preprocess, train, evaluate.
pub fn run_trial(
    dataset: &Dataset,
    a_hat: &SparseGraph,
    spec: &ExperimentSpec,
    model: &ModelSpec,
    seed: u64,
    point: TrialPoint,
) -> Result<TrialOutcome> {
    let (majority_class, split) = split_for(dataset, &spec.split, point.n_minority, seed)?;
    let features = trial_features(dataset, &spec.preprocess, point.noise_fraction, seed)?;
    let model_seed = derive_seed(seed, stream::MODEL);
    let labels = &dataset.labels;

    let (predictions, final_predictions, diagnostics, trained) = if model.kind.is_ensemble() {
        let mut config = model.boost_config(model_seed);
        config.num_estimators = point.num_estimators;
        config.base.epochs = point.epochs;
        let outcome = train_adagcn(a_hat, &features, labels, &split, &config)?;
        let (pred, _) = ensemble_predict(&outcome.model, a_hat, &features)?;
        let (final_pred, _) = ensemble_predict(&outcome.final_epoch_model, a_hat, &features)?;
        (
            pred,
            final_pred,
            Some(outcome.diagnostics),
            TrainedModel::Ensemble(outcome.model),
        )
    } else {
        let mut config = model.train_config(model_seed);
        config.epochs = point.epochs;
        let weights = SampleWeights::uniform(split.train.len())?;
        let outcome = train_gcn(
            a_hat,
            &features,
            labels,
            &split,
            weights.as_slice(),
            &config,
            None,
        )?;
        let pred = predict(a_hat, &features, &outcome.params)?.argmax();
        let final_pred = predict(a_hat, &features, &outcome.final_params)?.argmax();
        let trained = TrainedModel::Single {
            params: outcome.params,
            history: outcome.history,
            selected_epoch: outcome.selected_epoch,
        };
        (pred, final_pred, None, trained)
    };

    let metrics = evaluate(&predictions, labels, &split.test)?;
    let final_epoch_accuracy = evaluate(&final_predictions, labels, &split.test)?.accuracy;
    Ok(TrialOutcome {
        report: TrialReport {
            seed,
            model: model.display_name().to_owned(),
            kind: model.kind,
            majority_class,
            n_majority: spec.split.n_majority,
            point,
            train_size: split.train.len(),
            test_size: split.test.len(),
            metrics,
            final_epoch_accuracy,
        },
        split,
        predictions,
        diagnostics,
        trained,
    })
}

/// Runs every (seed, sweep point, model) trial of `spec` on `jobs` threads.
///
/// Invalid specs fail up front. Individual trial failures are collected with
/// their seed and do not stop the remaining trials.
pub fn run_experiment(
    dataset: &Dataset,
    spec: &ExperimentSpec,
    jobs: usize,
) -> Result<ExperimentResult> {
    spec.validate()?;
    let models = spec.model_list();
    let a_hat = normalize_adjacency(&dataset.graph, spec.preprocess.self_loops);
    let model_points: Vec<Vec<TrialPoint>> = models.iter().map(|m| points_for(spec, m)).collect();

    let mut seen = BTreeSet::new();
    let mut job_list = Vec::new();
    let max_points = model_points.iter().map(Vec::len).max().unwrap_or(0);
    for &seed in &spec.seeds {
        if !seen.insert(seed) {
            return Err(Error::InvalidParameter(format!("seed {seed} listed twice")));
        }
        for p in 0..max_points {
            for (m, points) in model_points.iter().enumerate() {
                if let Some(&point) = points.get(p) {
                    job_list.push(Job {
                        seed,
                        model: m,
                        point,
                    });
                }
            }
        }
    }

    let run = |job: &Job| {
        run_trial(
            dataset,
            &a_hat,
            spec,
            &models[job.model],
            job.seed,
            job.point,
        )
    };
    let results: Vec<Result<TrialOutcome>> = if jobs <= 1 {
        job_list.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| job_list.par_iter().map(run).collect())
    };

    let mut outcomes = Vec::new();
    let mut failures = Vec::new();
    for (job, result) in job_list.iter().zip(results) {
        match result {
            Ok(o) => outcomes.push(o),
            Err(e) => failures.push(TrialFailure {
                seed: job.seed,
                model: models[job.model].display_name().to_owned(),
                point: job.point,
                message: e.to_string(),
            }),
        }
    }

    let mut rows = Vec::new();
    for (model, points) in models.iter().zip(&model_points) {
        let name = model.display_name();
        for point in points {
            let acc: Vec<f64> = outcomes
                .iter()
                .map(|o| &o.report)
                .filter(|r| r.model == name && r.point.same_as(point))
                .map(|r| r.metrics.accuracy)
                .collect();
            if acc.is_empty() {
                continue;
            }
            let (mean, std) = mean_std(&acc);
            rows.push(SummaryRow {
                model: name.to_owned(),
                point: *point,
                mean_accuracy: mean,
                std_accuracy: std,
                trials: acc.len(),
                single_trial: acc.len() == 1,
            });
        }
    }

    Ok(ExperimentResult {
        sweep: spec.sweep.clone(),
        outcomes,
        failures,
        summary: SweepSummary {
            sweep: spec.sweep.name().to_owned(),
            rows,
        },
    })
}

/// Runs `spec` (with its own sweep) over `seeds` on the current thread.
pub fn run_trials(
    dataset: &Dataset,
    spec: &ExperimentSpec,
    seeds: &[u64],
) -> Result<ExperimentResult> {
    let spec = ExperimentSpec {
        seeds: seeds.to_vec(),
        ..spec.clone()
    };
    run_experiment(dataset, &spec, 1)
}

fn with_sweep(
    dataset: &Dataset,
    base: &ExperimentSpec,
    sweep: SweepSpec,
    seeds: &[u64],
) -> Result<ExperimentResult> {
    let spec = ExperimentSpec {
        sweep,
        seeds: seeds.to_vec(),
        ..base.clone()
    };
    run_experiment(dataset, &spec, 1)
}

/// One group per (model, minority count).
pub fn sweep_minority_count(
    dataset: &Dataset,
    base: &ExperimentSpec,
    counts: &[usize],
    seeds: &[u64],
) -> Result<ExperimentResult> {
    with_sweep(
        dataset,
        base,
        SweepSpec::MinorityCount {
            values: counts.to_vec(),
        },
        seeds,
    )
}

/// One group per (model, ensemble size, epochs).
pub fn sweep_estimators(
    dataset: &Dataset,
    base: &ExperimentSpec,
    m_values: &[usize],
    epochs_values: &[usize],
    seeds: &[u64],
) -> Result<ExperimentResult> {
    let sweep = SweepSpec::Estimators {
        m_values: m_values.to_vec(),
        epochs_values: epochs_values.to_vec(),
    };
    with_sweep(dataset, base, sweep, seeds)
}

/// One group per (model, removal fraction). Each seed removes the same
/// entries for every model.
pub fn sweep_feature_noise(
    dataset: &Dataset,
    base: &ExperimentSpec,
    fractions: &[f64],
    seeds: &[u64],
) -> Result<ExperimentResult> {
    with_sweep(
        dataset,
        base,
        SweepSpec::FeatureNoise {
            values: fractions.to_vec(),
        },
        seeds,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    /// 1-based boosting round.
    pub round: usize,
    /// Node id of the training sample.
    pub sample_index: usize,
    pub weight: f64,
}

/// Weight each selected training node carried into each round. `None`
/// selects every training node.
pub fn export_weight_traces(
    diagnostics: &BoostDiagnostics,
    sample_indices: Option<&[usize]>,
) -> Result<Vec<TraceRow>> {
    let positions: Vec<usize> = match sample_indices {
        None => (0..diagnostics.train_idx.len()).collect(),
        Some(nodes) => nodes
            .iter()
            .map(|&node| {
                diagnostics
                    .train_idx
                    .iter()
                    .position(|&t| t == node)
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "unknown sample index {node}: not a training node"
                        ))
                    })
            })
            .collect::<Result<_>>()?,
    };
    Ok(diagnostics
        .rounds
        .iter()
        .flat_map(|r| {
            positions.iter().map(move |&p| TraceRow {
                round: r.round,
                sample_index: diagnostics.train_idx[p],
                weight: r.weights[p],
            })
        })
        .collect())
}
