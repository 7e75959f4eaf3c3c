//! SAMME.R-style boosting over GCN base classifiers.
//!
//! Each round trains a GCN on the current sample-weight distribution, scores
//! its weighted training error, and multiplies every sample's weight by
//! `p_true^{-a(C-1)/C}` so poorly-fit samples gain mass. At test time the
//! per-member scores `(C-1)·(log p_k − mean_j log p_j)` are summed and the
//! argmax taken.

mod checkpoint;
mod ensemble;

pub use checkpoint::{read_ensemble, write_ensemble, ENSEMBLE_MAGIC, ENSEMBLE_VERSION};
pub use ensemble::{
    ensemble_predict, round_seed, train_adagcn, AdaGcnOutcome, BoostDiagnostics, EnsembleMember,
    EnsembleModel, RoundDiagnostics,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcn::{TrainConfig, PROB_FLOOR};
use crate::matrix::Matrix;

/// Clip applied to the weighted error before computing α.
pub const EPSILON_CLIP: f64 = 1e-10;

/// Cap on a single sample's reweighting multiplier before normalization.
pub const MULTIPLIER_CAP: f64 = 1e12;

/// Positive weights over the training nodes, summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleWeights(Vec<f64>);

impl SampleWeights {
    /// Uniform `1/n` weights.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "cannot weight an empty training set".into(),
            ));
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    /// Normalizes arbitrary positive masses into a distribution.
    pub fn from_masses(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() || masses.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidParameter(
                "weights must be finite and positive".into(),
            ));
        }
        let total: f64 = masses.iter().sum();
        Ok(Self(masses.into_iter().map(|w| w / total).collect()))
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

pub fn init_weights(n: usize) -> Result<SampleWeights> {
    SampleWeights::uniform(n)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostConfig {
    pub num_estimators: usize,
    /// Shrinkage `a` in the reweighting exponent.
    pub shrinkage: f64,
    pub transfer_learning: bool,
    /// Scale each member's scores by its α when aggregating.
    pub use_alpha_in_prediction: bool,
    pub base: TrainConfig,
}

impl Default for BoostConfig {
    fn default() -> Self {
        Self {
            num_estimators: 5,
            shrinkage: 1.0,
            transfer_learning: true,
            use_alpha_in_prediction: false,
            base: TrainConfig::default(),
        }
    }
}

impl BoostConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_estimators == 0 {
            return Err(Error::InvalidParameter(
                "num_estimators must be at least 1".into(),
            ));
        }
        if !(self.shrinkage > 0.0 && self.shrinkage.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "shrinkage {} must be positive",
                self.shrinkage
            )));
        }
        self.base.validate()
    }
}

/// Sum of the weights of misclassified samples.
pub fn weighted_error(
    predicted: &[usize],
    truth: &[usize],
    weights: &SampleWeights,
) -> Result<f64> {
    if predicted.len() != truth.len() || truth.len() != weights.len() {
        return Err(Error::LengthMismatch {
            what: "predictions/labels/weights",
            got: predicted.len().max(truth.len()),
            expected: weights.len(),
        });
    }
    let err: f64 = predicted
        .iter()
        .zip(truth)
        .zip(weights.as_slice())
        .filter(|((p, t), _)| p != t)
        .fold(0.0, |acc, (_, w)| acc + w);
    Ok(err.clamp(0.0, 1.0))
}

/// `½ ln((1 − ε) / ε)` with ε clipped into `[1e-10, 1 − 1e-10]`.
pub fn classifier_alpha(epsilon: f64) -> f64 {
    let e = epsilon.clamp(EPSILON_CLIP, 1.0 - EPSILON_CLIP);
    0.5 * ((1.0 - e) / e).ln()
}

/// `exp(−a · (C−1)/C · ln p_true)`, capped at [`MULTIPLIER_CAP`].
///
/// `p_true` is clipped below at the probability floor, so the multiplier is
/// always at least one.
pub fn sample_weight_multiplier(p_true: f64, num_classes: usize, shrinkage: f64) -> f64 {
    let c = num_classes as f64;
    let log_p = p_true.clamp(PROB_FLOOR, 1.0).ln();
    (-shrinkage * ((c - 1.0) / c) * log_p)
        .exp()
        .min(MULTIPLIER_CAP)
}

/// Reweighted masses before normalization.
pub fn reweight(
    weights: &SampleWeights,
    p_true: &[f64],
    num_classes: usize,
    shrinkage: f64,
) -> Result<Vec<f64>> {
    if p_true.len() != weights.len() {
        return Err(Error::LengthMismatch {
            what: "true-class probabilities",
            got: p_true.len(),
            expected: weights.len(),
        });
    }
    Ok(weights
        .as_slice()
        .iter()
        .zip(p_true)
        .map(|(w, p)| w * sample_weight_multiplier(*p, num_classes, shrinkage))
        .collect())
}

/// Reweights by [`sample_weight_multiplier`] and renormalizes to sum one.
pub fn update_sample_weights(
    weights: &SampleWeights,
    p_true: &[f64],
    num_classes: usize,
    shrinkage: f64,
) -> Result<SampleWeights> {
    SampleWeights::from_masses(reweight(weights, p_true, num_classes, shrinkage)?)
}

/// `h_k = (C − 1) · (log p_k − (1/C) Σ_j log p_j)` on floor-clipped probabilities.
pub fn classifier_score(probs_row: &[f64]) -> Vec<f64> {
    let c = probs_row.len() as f64;
    let logs: Vec<f64> = probs_row.iter().map(|p| p.max(PROB_FLOOR).ln()).collect();
    let mean = logs.iter().sum::<f64>() / c;
    logs.into_iter().map(|l| (c - 1.0) * (l - mean)).collect()
}

/// [`classifier_score`] applied to every row.
pub fn score_matrix(probs: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(probs.rows(), probs.cols());
    for (r, row) in probs.iter_rows().enumerate() {
        out.row_mut(r).copy_from_slice(&classifier_score(row));
    }
    out
}
