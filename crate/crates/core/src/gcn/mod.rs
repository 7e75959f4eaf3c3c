//! Two-layer graph convolutional network trained with manual backprop.
//!
//! The model is `softmax(Â · relu(Â X W0) · W1)` with no bias terms. All
//! gradients are derived by hand in [`backward`]; there is no autodiff.

mod adam;
mod backward;
pub(crate) mod checkpoint;
mod forward;
mod loss;
mod train;

pub use adam::{adam_step, AdamState, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON};
pub use backward::{backward, ParamGrads};
pub use checkpoint::{read_params, write_params, PARAMS_MAGIC, PARAMS_VERSION};
pub use forward::{forward, predict, softmax_rows, ForwardCache};
pub use loss::{
    cb_focal_loss, class_balanced_weights, focal_loss, l2_penalty, logit_gradient, objective,
    weighted_cross_entropy, Objective, PROB_FLOOR,
};
pub use train::{accuracy_on, train_gcn, EpochRecord, TrainOutcome};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{argmax, Matrix};

/// Weights `W0: F×H` and `W1: H×C` of one base classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcnParams {
    pub w0: Matrix,
    pub w1: Matrix,
}

impl GcnParams {
    pub fn new(w0: Matrix, w1: Matrix) -> Result<Self> {
        if w0.cols() != w1.rows() {
            return Err(Error::DimensionMismatch(format!(
                "w0 is {}x{} but w1 is {}x{}",
                w0.rows(),
                w0.cols(),
                w1.rows(),
                w1.cols()
            )));
        }
        Ok(Self { w0, w1 })
    }

    pub fn zeros(num_features: usize, hidden_dim: usize, num_classes: usize) -> Self {
        Self {
            w0: Matrix::zeros(num_features, hidden_dim),
            w1: Matrix::zeros(hidden_dim, num_classes),
        }
    }

    /// Glorot-uniform initialization, `U(-r, r)` with `r = sqrt(6 / (fan_in + fan_out))`.
    pub fn glorot<R: Rng + ?Sized>(
        num_features: usize,
        hidden_dim: usize,
        num_classes: usize,
        rng: &mut R,
    ) -> Self {
        let mut init = |rows: usize, cols: usize| {
            let limit = (6.0 / (rows + cols) as f64).sqrt();
            let mut m = Matrix::zeros(rows, cols);
            for v in m.as_mut_slice() {
                *v = rng.random_range(-limit..limit);
            }
            m
        };
        let w0 = init(num_features, hidden_dim);
        let w1 = init(hidden_dim, num_classes);
        Self { w0, w1 }
    }

    #[inline]
    pub fn num_features(&self) -> usize {
        self.w0.rows()
    }

    #[inline]
    pub fn hidden_dim(&self) -> usize {
        self.w0.cols()
    }

    #[inline]
    pub fn num_classes(&self) -> usize {
        self.w1.cols()
    }

    pub fn is_finite(&self) -> bool {
        self.w0.is_finite() && self.w1.is_finite()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    #[default]
    WeightedCe,
    Focal,
    CbFocal,
}

/// Hyperparameters for one GCN training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2_lambda: f64,
    pub hidden_dim: usize,
    pub dropout_rate: f64,
    pub loss_kind: LossKind,
    pub focal_gamma: f64,
    pub cb_beta: f64,
    pub seed: u64,
    /// Return the snapshot with the best validation accuracy instead of the
    /// last epoch's parameters.
    pub best_epoch_selection: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            epochs: 100,
            l2_lambda: 5e-4,
            hidden_dim: 16,
            dropout_rate: 0.0,
            loss_kind: LossKind::WeightedCe,
            focal_gamma: 2.0,
            cb_beta: 0.999,
            seed: 0,
            best_epoch_selection: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        // a zero rate is allowed: it freezes warm-started parameters
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "learning_rate {} must be finite and nonnegative",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("epochs must be at least 1".into()));
        }
        if self.hidden_dim == 0 {
            return Err(Error::InvalidParameter(
                "hidden_dim must be at least 1".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::InvalidParameter(format!(
                "dropout_rate {} outside [0, 1)",
                self.dropout_rate
            )));
        }
        if self.l2_lambda < 0.0 || !self.l2_lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "l2_lambda {} invalid",
                self.l2_lambda
            )));
        }
        if self.focal_gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "focal_gamma {} < 0",
                self.focal_gamma
            )));
        }
        if !(0.0..1.0).contains(&self.cb_beta) {
            return Err(Error::InvalidParameter(format!(
                "cb_beta {} outside [0, 1)",
                self.cb_beta
            )));
        }
        Ok(())
    }
}

/// Row-stochastic `N×C` class-probability matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionMatrix(Matrix);

impl PredictionMatrix {
    /// Wraps `probs` after checking that every row is a distribution.
    pub fn new(probs: Matrix) -> Result<Self> {
        for (i, row) in probs.iter_rows().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-6 || row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::InvalidParameter(format!(
                    "row {i} is not a probability distribution"
                )));
            }
        }
        Ok(Self(probs))
    }

    pub fn from_logits(logits: &Matrix) -> Self {
        Self(softmax_rows(logits))
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        self.0.row(i)
    }

    #[inline]
    pub fn num_classes(&self) -> usize {
        self.0.cols()
    }

    #[inline]
    pub fn num_rows(&self) -> usize {
        self.0.rows()
    }

    /// Row-wise argmax; ties go to the lowest class index.
    pub fn argmax(&self) -> Vec<usize> {
        self.0.argmax_rows()
    }

    pub fn argmax_of(&self, rows: &[usize]) -> Vec<usize> {
        rows.iter().map(|&i| argmax(self.0.row(i))).collect()
    }

    /// Probability each of `rows` assigns to its own label.
    pub fn true_class_probs(&self, rows: &[usize], labels: &[usize]) -> Vec<f64> {
        rows.iter()
            .zip(labels)
            .map(|(&i, &y)| self.0.get(i, y))
            .collect()
    }
}
