//! Sample-weighted training losses.
//!
//! All three losses share the per-sample form `s_i · φ(p_i)` where `p_i` is
//! the probability of the true class, `φ(p) = (1 - p)^γ · (-ln p)` and `s_i`
//! is the sample weight times an optional per-class weight. Cross-entropy is
//! `γ = 0` with no class weights.

use crate::dataset::LabelArray;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::{GcnParams, LossKind, PredictionMatrix, TrainConfig};

/// Lower clip for probabilities inside every logarithm.
pub const PROB_FLOOR: f64 = 1e-10;

/// Resolved loss for one training run.
#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    pub gamma: f64,
    /// Per-class multipliers; `None` means all ones.
    pub class_weights: Option<Vec<f64>>,
}

impl Objective {
    pub fn cross_entropy() -> Self {
        Self {
            gamma: 0.0,
            class_weights: None,
        }
    }

    pub fn focal(gamma: f64) -> Self {
        Self {
            gamma,
            class_weights: None,
        }
    }

    /// Builds the loss selected by `config`, counting classes over `train_idx`
    /// for the class-balanced variant.
    pub fn from_config(
        config: &TrainConfig,
        labels: &LabelArray,
        train_idx: &[usize],
    ) -> Result<Self> {
        Ok(match config.loss_kind {
            LossKind::WeightedCe => Self::cross_entropy(),
            LossKind::Focal => Self::focal(config.focal_gamma),
            LossKind::CbFocal => {
                let counts = labels.class_histogram(train_idx);
                Self {
                    gamma: config.focal_gamma,
                    class_weights: Some(class_balanced_weights(&counts, config.cb_beta)?),
                }
            }
        })
    }

    fn class_weight(&self, class: usize) -> f64 {
        self.class_weights.as_ref().map_or(1.0, |w| w[class])
    }
}

#[inline]
fn clip(p: f64) -> f64 {
    p.clamp(PROB_FLOOR, 1.0)
}

/// `φ(p) = (1 - p)^γ · (-ln p)` on the clipped probability.
#[inline]
fn focal_term(p: f64, gamma: f64) -> f64 {
    let p = clip(p);
    let modulator = if gamma == 0.0 {
        1.0
    } else {
        (1.0 - p).powf(gamma)
    };
    modulator * -p.ln()
}

/// `p · dφ/dp`, zero when `p` sits below the clip floor.
#[inline]
fn focal_term_scaled_derivative(p: f64, gamma: f64) -> f64 {
    if p < PROB_FLOOR {
        return 0.0;
    }
    let p = p.min(1.0);
    // p·φ'(p) = γ(1-p)^(γ-1)·p·ln p − (1-p)^γ
    let focusing = if gamma == 0.0 || p >= 1.0 {
        0.0
    } else {
        gamma * (1.0 - p).powf(gamma - 1.0) * p * p.ln()
    };
    let modulator = if gamma == 0.0 {
        1.0
    } else {
        (1.0 - p).powf(gamma)
    };
    focusing - modulator
}

fn check_alignment(train_idx: &[usize], weights: &[f64]) -> Result<()> {
    if weights.len() != train_idx.len() {
        return Err(Error::LengthMismatch {
            what: "sample weights",
            got: weights.len(),
            expected: train_idx.len(),
        });
    }
    Ok(())
}

fn data_loss(
    probs: &PredictionMatrix,
    labels: &LabelArray,
    train_idx: &[usize],
    weights: &[f64],
    objective: &Objective,
) -> Result<f64> {
    check_alignment(train_idx, weights)?;
    let targets = labels.gather(train_idx)?;
    Ok(train_idx
        .iter()
        .zip(&targets)
        .zip(weights)
        .map(|((&i, &y), &w)| {
            w * objective.class_weight(y) * focal_term(probs.matrix().get(i, y), objective.gamma)
        })
        .sum())
}

/// `(λ/2)·(‖W0‖² + ‖W1‖²)`.
pub fn l2_penalty(params: &GcnParams, l2_lambda: f64) -> f64 {
    0.5 * l2_lambda * (params.w0.squared_norm() + params.w1.squared_norm())
}

/// `Σ w_i · (−ln p_{i,y_i}) + (λ/2)·(‖W0‖² + ‖W1‖²)`.
pub fn weighted_cross_entropy(
    probs: &PredictionMatrix,
    labels: &LabelArray,
    train_idx: &[usize],
    weights: &[f64],
    params: &GcnParams,
    l2_lambda: f64,
) -> Result<f64> {
    Ok(data_loss(
        probs,
        labels,
        train_idx,
        weights,
        &Objective::cross_entropy(),
    )? + l2_penalty(params, l2_lambda))
}

/// `Σ w_i · (1 − p_{i,y_i})^γ · (−ln p_{i,y_i})`.
pub fn focal_loss(
    probs: &PredictionMatrix,
    labels: &LabelArray,
    train_idx: &[usize],
    weights: &[f64],
    gamma: f64,
) -> Result<f64> {
    if gamma < 0.0 {
        return Err(Error::InvalidParameter(format!("gamma {gamma} < 0")));
    }
    data_loss(probs, labels, train_idx, weights, &Objective::focal(gamma))
}

/// Effective-number class weights `(1 − β) / (1 − β^{n_k})`, rescaled so the
/// weights of classes with at least one sample sum to `C`. Classes with no
/// samples get weight zero.
pub fn class_balanced_weights(class_counts: &[usize], beta: f64) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!(
            "beta {beta} outside [0, 1)"
        )));
    }
    let raw: Vec<f64> = class_counts
        .iter()
        .map(|&n| {
            if n == 0 {
                0.0
            } else {
                (1.0 - beta) / (1.0 - beta.powi(n as i32))
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        return Err(Error::InvalidParameter(
            "no class has any training samples".into(),
        ));
    }
    let scale = class_counts.len() as f64 / total;
    Ok(raw.into_iter().map(|w| w * scale).collect())
}

/// Focal loss with each sample additionally scaled by its class's
/// effective-number weight.
pub fn cb_focal_loss(
    probs: &PredictionMatrix,
    labels: &LabelArray,
    train_idx: &[usize],
    weights: &[f64],
    class_counts: &[usize],
    beta: f64,
    gamma: f64,
) -> Result<f64> {
    if gamma < 0.0 {
        return Err(Error::InvalidParameter(format!("gamma {gamma} < 0")));
    }
    if class_counts.len() != labels.num_classes() {
        return Err(Error::LengthMismatch {
            what: "class counts",
            got: class_counts.len(),
            expected: labels.num_classes(),
        });
    }
    let class_weights = class_balanced_weights(class_counts, beta)?;
    for (&i, &w) in train_idx.iter().zip(weights) {
        let y = labels.gather(&[i])?[0];
        if class_counts[y] == 0 && w != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "class {y} has zero counted samples but train node {i} carries weight"
            )));
        }
    }
    let objective = Objective {
        gamma,
        class_weights: Some(class_weights),
    };
    data_loss(probs, labels, train_idx, weights, &objective)
}

/// Full training objective: data loss plus the L2 penalty on both layers.
pub fn objective(
    probs: &PredictionMatrix,
    labels: &LabelArray,
    train_idx: &[usize],
    weights: &[f64],
    params: &GcnParams,
    l2_lambda: f64,
    objective: &Objective,
) -> Result<f64> {
    Ok(data_loss(probs, labels, train_idx, weights, objective)? + l2_penalty(params, l2_lambda))
}

/// Gradient of the data loss with respect to the logits.
///
/// For sample `i` with true class `y`, `∂L/∂z_{ik} = s_i · p·φ'(p) · (δ_{ky} − p_{ik})`
/// where `p = p_{iy}`. Rows outside `train_idx` are zero.
pub fn logit_gradient(
    probs: &PredictionMatrix,
    labels: &LabelArray,
    train_idx: &[usize],
    weights: &[f64],
    objective: &Objective,
) -> Result<Matrix> {
    check_alignment(train_idx, weights)?;
    let targets = labels.gather(train_idx)?;
    let c = probs.num_classes();
    let mut grad = Matrix::zeros(probs.num_rows(), c);
    for ((&i, &y), &w) in train_idx.iter().zip(&targets).zip(weights) {
        let row = probs.row(i);
        let coeff =
            w * objective.class_weight(y) * focal_term_scaled_derivative(row[y], objective.gamma);
        let out = grad.row_mut(i);
        for k in 0..c {
            let delta = if k == y { 1.0 } else { 0.0 };
            out[k] += coeff * (delta - row[k]);
        }
    }
    Ok(grad)
}
