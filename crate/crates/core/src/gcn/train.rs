use serde::{Deserialize, Serialize};

use crate::dataset::{LabelArray, NodeSplit};
use crate::error::{Error, Result};
use crate::graph::SparseGraph;
use crate::matrix::Matrix;
use crate::rng::{derive_seed, rng_from_seed, stream};

use super::loss::{objective, Objective};
use super::{
    adam_step, backward, forward, predict, AdamState, GcnParams, PredictionMatrix, TrainConfig,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Objective before this epoch's update.
    pub train_loss: f64,
    /// Validation accuracy after this epoch's update; NaN with no validation nodes.
    pub val_acc: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    /// Parameters selected for use: best-validation snapshot or final epoch.
    pub params: GcnParams,
    pub final_params: GcnParams,
    /// 1-based epoch the selected parameters come from.
    pub selected_epoch: usize,
    pub history: Vec<EpochRecord>,
}

/// Fraction of `nodes` whose argmax prediction equals the label.
pub fn accuracy_on(probs: &PredictionMatrix, labels: &LabelArray, nodes: &[usize]) -> Result<f64> {
    if nodes.is_empty() {
        return Ok(f64::NAN);
    }
    let truth = labels.gather(nodes)?;
    let pred = probs.argmax_of(nodes);
    let correct = pred.iter().zip(&truth).filter(|(p, t)| p == t).count();
    Ok(correct as f64 / nodes.len() as f64)
}

/// Full-batch training of one GCN on sample-weighted training nodes.
///
/// `weights` is aligned with `split.train`. Starts from `warm_start` when
/// given (with fresh optimizer state), otherwise from a Glorot draw seeded by
/// `config.seed`.
pub fn train_gcn(
    a_hat: &SparseGraph,
    features: &Matrix,
    labels: &LabelArray,
    split: &NodeSplit,
    weights: &[f64],
    config: &TrainConfig,
    warm_start: Option<&GcnParams>,
) -> Result<TrainOutcome> {
    config.validate()?;
    if weights.len() != split.train.len() {
        return Err(Error::LengthMismatch {
            what: "sample weights",
            got: weights.len(),
            expected: split.train.len(),
        });
    }
    let (f, c) = (features.cols(), labels.num_classes());
    let mut params = match warm_start {
        Some(p) => {
            if (p.num_features(), p.hidden_dim(), p.num_classes()) != (f, config.hidden_dim, c) {
                return Err(Error::DimensionMismatch(format!(
                    "warm start is {}x{}x{}, run expects {f}x{}x{c}",
                    p.num_features(),
                    p.hidden_dim(),
                    p.num_classes(),
                    config.hidden_dim
                )));
            }
            p.clone()
        }
        None => GcnParams::glorot(f, config.hidden_dim, c, &mut rng_from_seed(config.seed)),
    };
    let loss = Objective::from_config(config, labels, &split.train)?;
    let mut dropout_rng = rng_from_seed(derive_seed(config.seed, stream::DROPOUT));
    let mut adam = AdamState::new(&params);

    let mut history = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, GcnParams)> = None;
    for epoch in 1..=config.epochs {
        let cache = forward(
            a_hat,
            features,
            &params,
            config.dropout_rate,
            Some(&mut dropout_rng),
        )?;
        let train_loss = objective(
            cache.probs(),
            labels,
            &split.train,
            weights,
            &params,
            config.l2_lambda,
            &loss,
        )?;
        if !train_loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        let grads = backward(
            a_hat,
            labels,
            &split.train,
            weights,
            &params,
            &cache,
            config.l2_lambda,
            &loss,
        )?;
        drop(cache);
        adam_step(&mut params, &grads, &mut adam, config.learning_rate)?;
        if !params.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }

        let val_acc = if split.val.is_empty() {
            f64::NAN
        } else {
            accuracy_on(&predict(a_hat, features, &params)?, labels, &split.val)?
        };
        history.push(EpochRecord {
            epoch,
            train_loss,
            val_acc,
        });
        if config.best_epoch_selection && !split.val.is_empty() {
            // strict improvement keeps the earliest epoch on ties
            if best.as_ref().is_none_or(|(acc, _, _)| val_acc > *acc) {
                best = Some((val_acc, epoch, params.clone()));
            }
        }
    }

    let (selected, selected_epoch) = match best {
        Some((_, epoch, p)) => (p, epoch),
        None => (params.clone(), config.epochs),
    };
    Ok(TrainOutcome {
        params: selected,
        final_params: params,
        selected_epoch,
        history,
    })
}
