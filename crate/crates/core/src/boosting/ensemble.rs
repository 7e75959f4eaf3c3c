use serde::{Deserialize, Serialize};

use crate::dataset::{LabelArray, NodeSplit};
use crate::error::{Error, Result};
use crate::gcn::{predict, train_gcn, EpochRecord, GcnParams, TrainConfig};
use crate::graph::SparseGraph;
use crate::matrix::Matrix;
use crate::rng::derive_seed;

use super::{
    classifier_alpha, init_weights, score_matrix, update_sample_weights, weighted_error,
    BoostConfig,
};

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleMember {
    pub params: GcnParams,
    pub alpha: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleModel {
    pub members: Vec<EnsembleMember>,
    pub num_classes: usize,
    pub config: BoostConfig,
}

/// What one boosting round saw and produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundDiagnostics {
    /// 1-based round index.
    pub round: usize,
    pub epsilon: f64,
    pub alpha: f64,
    /// `ε ≥ (C−1)/C`: no better than chance. The round is kept regardless.
    pub weak: bool,
    /// Distribution this round was trained on, aligned with the train split.
    pub weights: Vec<f64>,
    /// Member probability of each training node's true class.
    pub p_true: Vec<f64>,
    /// Whether the member's argmax matched the label.
    pub correct: Vec<bool>,
    pub selected_epoch: usize,
    pub history: Vec<EpochRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostDiagnostics {
    pub train_idx: Vec<usize>,
    pub rounds: Vec<RoundDiagnostics>,
    /// Distribution after the last update (what round M+1 would train on).
    pub final_weights: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct AdaGcnOutcome {
    pub model: EnsembleModel,
    /// Same α/ε trajectory, but each member holds its last-epoch parameters.
    pub final_epoch_model: EnsembleModel,
    pub diagnostics: BoostDiagnostics,
}

/// Initialization seed for round `round` (0-based). Round 0 uses `seed`
/// unchanged so a one-member ensemble matches a standalone GCN run.
pub fn round_seed(seed: u64, round: usize) -> u64 {
    if round == 0 {
        seed
    } else {
        derive_seed(seed, round as u64)
    }
}

/// Trains `config.num_estimators` GCNs in sequence.
///
/// Round `m` trains on the current weights (warm-started from round `m−1`
/// when transfer is on), measures the weighted training error of its argmax
/// predictions, records α, then reweights every training node by its
/// true-class probability and renormalizes.
pub fn train_adagcn(
    a_hat: &SparseGraph,
    features: &Matrix,
    labels: &LabelArray,
    split: &NodeSplit,
    config: &BoostConfig,
) -> Result<AdaGcnOutcome> {
    config.validate()?;
    let num_classes = labels.num_classes();
    let truth = labels.gather(&split.train)?;
    let mut weights = init_weights(split.train.len())?;

    let mut members = Vec::with_capacity(config.num_estimators);
    let mut final_members = Vec::with_capacity(config.num_estimators);
    let mut rounds = Vec::with_capacity(config.num_estimators);
    let mut previous: Option<GcnParams> = None;

    for m in 0..config.num_estimators {
        let round_config = TrainConfig {
            seed: round_seed(config.base.seed, m),
            ..config.base.clone()
        };
        let warm = if config.transfer_learning {
            previous.as_ref()
        } else {
            None
        };
        let wrap = |source: Error| Error::Round {
            round: m + 1,
            source: Box::new(source),
        };
        let outcome = train_gcn(
            a_hat,
            features,
            labels,
            split,
            weights.as_slice(),
            &round_config,
            warm,
        )
        .map_err(wrap)?;

        let probs = predict(a_hat, features, &outcome.params).map_err(wrap)?;
        let predicted = probs.argmax_of(&split.train);
        let p_true = probs.true_class_probs(&split.train, &truth);
        let epsilon = weighted_error(&predicted, &truth, &weights)?;
        let alpha = classifier_alpha(epsilon);
        let next = update_sample_weights(&weights, &p_true, num_classes, config.shrinkage)
            .map_err(wrap)?;

        rounds.push(RoundDiagnostics {
            round: m + 1,
            epsilon,
            alpha,
            weak: epsilon >= (num_classes as f64 - 1.0) / num_classes as f64,
            weights: weights.as_slice().to_vec(),
            correct: predicted.iter().zip(&truth).map(|(p, t)| p == t).collect(),
            p_true,
            selected_epoch: outcome.selected_epoch,
            history: outcome.history,
        });
        final_members.push(EnsembleMember {
            params: outcome.final_params,
            alpha,
            epsilon,
        });
        members.push(EnsembleMember {
            params: outcome.params.clone(),
            alpha,
            epsilon,
        });
        previous = Some(outcome.params);
        weights = next;
    }

    let diagnostics = BoostDiagnostics {
        train_idx: split.train.clone(),
        rounds,
        final_weights: weights.into_vec(),
    };
    Ok(AdaGcnOutcome {
        model: EnsembleModel {
            members,
            num_classes,
            config: config.clone(),
        },
        final_epoch_model: EnsembleModel {
            members: final_members,
            num_classes,
            config: config.clone(),
        },
        diagnostics,
    })
}

/// Sums per-member scores over all nodes and takes the row argmax.
///
/// Members are unweighted unless `use_alpha_in_prediction` is set, in which
/// case each member's score matrix is scaled by its α.
pub fn ensemble_predict(
    model: &EnsembleModel,
    a_hat: &SparseGraph,
    features: &Matrix,
) -> Result<(Vec<usize>, Matrix)> {
    if model.members.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut total = Matrix::zeros(a_hat.num_nodes(), model.num_classes);
    for member in &model.members {
        let probs = predict(a_hat, features, &member.params)?;
        let scores = score_matrix(probs.matrix());
        let scale = if model.config.use_alpha_in_prediction {
            member.alpha
        } else {
            1.0
        };
        total.add_scaled(scale, &scores)?;
    }
    Ok((total.argmax_rows(), total))
}
