use std::borrow::Cow;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::SparseGraph;
use crate::matrix::Matrix;

use super::{GcnParams, PredictionMatrix};

/// Activations retained for the backward pass.
#[derive(Clone, Debug)]
pub struct ForwardCache<'a> {
    /// Layer-1 input after dropout (borrowed when no dropout was applied).
    pub(crate) input: Cow<'a, Matrix>,
    /// `Â X W0` before the ReLU.
    pub(crate) pre_activation: Matrix,
    /// ReLU output.
    pub(crate) hidden: Matrix,
    /// Per-entry dropout multiplier on `hidden` (0 or 1/keep), if any.
    pub(crate) hidden_mask: Option<Vec<f64>>,
    pub(crate) logits: Matrix,
    pub(crate) probs: PredictionMatrix,
    pub(crate) shape: (usize, usize, usize),
}

impl ForwardCache<'_> {
    pub fn hidden(&self) -> &Matrix {
        &self.hidden
    }

    pub fn logits(&self) -> &Matrix {
        &self.logits
    }

    pub fn probs(&self) -> &PredictionMatrix {
        &self.probs
    }

    pub fn into_probs(self) -> PredictionMatrix {
        self.probs
    }
}

/// Numerically stable row-wise softmax.
pub fn softmax_rows(logits: &Matrix) -> Matrix {
    let mut out = logits.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    out
}

fn dropout_mask<R: Rng + ?Sized>(len: usize, rate: f64, rng: &mut R) -> Vec<f64> {
    let keep = 1.0 - rate;
    let scale = 1.0 / keep;
    (0..len)
        .map(|_| {
            if rng.random::<f64>() < keep {
                scale
            } else {
                0.0
            }
        })
        .collect()
}

fn check_shapes(a_hat: &SparseGraph, x: &Matrix, params: &GcnParams) -> Result<()> {
    if a_hat.num_nodes() != x.rows() {
        return Err(Error::DimensionMismatch(format!(
            "graph has {} nodes but features have {} rows",
            a_hat.num_nodes(),
            x.rows()
        )));
    }
    if x.cols() != params.num_features() {
        return Err(Error::DimensionMismatch(format!(
            "features have {} columns but w0 expects {}",
            x.cols(),
            params.num_features()
        )));
    }
    if params.w0.cols() != params.w1.rows() {
        return Err(Error::DimensionMismatch(
            "w0 and w1 hidden sizes differ".into(),
        ));
    }
    Ok(())
}

/// Computes `softmax(Â · relu(Â X W0) · W1)`.
///
/// Dropout with inverted scaling is applied to `X` and to the hidden
/// activations when `dropout_rate > 0` and an RNG is supplied.
pub fn forward<'a, R: Rng + ?Sized>(
    a_hat: &SparseGraph,
    x: &'a Matrix,
    params: &GcnParams,
    dropout_rate: f64,
    rng: Option<&mut R>,
) -> Result<ForwardCache<'a>> {
    check_shapes(a_hat, x, params)?;
    let mut rng = rng.filter(|_| dropout_rate > 0.0);

    let input: Cow<'a, Matrix> = match rng.as_deref_mut() {
        Some(rng) => {
            let mask = dropout_mask(x.rows() * x.cols(), dropout_rate, rng);
            let mut dropped = x.clone();
            for (v, m) in dropped.as_mut_slice().iter_mut().zip(&mask) {
                *v *= m;
            }
            Cow::Owned(dropped)
        }
        None => Cow::Borrowed(x),
    };

    let pre_activation = a_hat.spmm(&input.matmul(&params.w0)?)?;
    let mut hidden = pre_activation.clone();
    hidden.map_inplace(|v| v.max(0.0));

    let hidden_mask = rng.map(|rng| dropout_mask(hidden.rows() * hidden.cols(), dropout_rate, rng));
    let logits = match &hidden_mask {
        Some(mask) => {
            let mut dropped = hidden.clone();
            for (v, m) in dropped.as_mut_slice().iter_mut().zip(mask) {
                *v *= m;
            }
            a_hat.spmm(&dropped.matmul(&params.w1)?)?
        }
        None => a_hat.spmm(&hidden.matmul(&params.w1)?)?,
    };
    let probs = PredictionMatrix::from_logits(&logits);

    Ok(ForwardCache {
        input,
        pre_activation,
        hidden,
        hidden_mask,
        logits,
        probs,
        shape: (
            params.num_features(),
            params.hidden_dim(),
            params.num_classes(),
        ),
    })
}

/// Inference-mode forward pass.
pub fn predict(a_hat: &SparseGraph, x: &Matrix, params: &GcnParams) -> Result<PredictionMatrix> {
    forward::<rand_chacha::ChaCha8Rng>(a_hat, x, params, 0.0, None).map(ForwardCache::into_probs)
}
