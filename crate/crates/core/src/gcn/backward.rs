use crate::dataset::LabelArray;
use crate::error::{Error, Result};
use crate::graph::SparseGraph;
use crate::matrix::Matrix;

use super::loss::{logit_gradient, Objective};
use super::{ForwardCache, GcnParams};

/// Gradients with the same shapes as [`GcnParams`].
#[derive(Clone, Debug, PartialEq)]
pub struct ParamGrads {
    pub gw0: Matrix,
    pub gw1: Matrix,
}

impl ParamGrads {
    pub fn is_finite(&self) -> bool {
        self.gw0.is_finite() && self.gw1.is_finite()
    }
}

/// Analytic gradient of the training objective (data loss plus L2).
///
/// With `T0 = X̃ W0`, `Z0 = Â T0`, `H = relu(Z0)`, `H̃ = dropout(H)`,
/// `Z1 = Â H̃ W1` and `G = ∂L/∂Z1`:
///
/// ```text
/// gW1 = H̃ᵀ (Â G) + λ W1
/// gW0 = X̃ᵀ Â ((Â G W1ᵀ) ⊙ mask ⊙ 1[Z0 > 0]) + λ W0
/// ```
///
/// `Â` is symmetric so `Âᵀ = Â`. The ReLU subgradient at zero is zero.
#[allow(clippy::too_many_arguments)]
pub fn backward(
    a_hat: &SparseGraph,
    labels: &LabelArray,
    train_idx: &[usize],
    weights: &[f64],
    params: &GcnParams,
    cache: &ForwardCache<'_>,
    l2_lambda: f64,
    objective: &Objective,
) -> Result<ParamGrads> {
    let shape = (
        params.num_features(),
        params.hidden_dim(),
        params.num_classes(),
    );
    if cache.shape != shape || cache.logits.rows() != a_hat.num_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "forward cache built for {:?}, params are {shape:?}",
            cache.shape
        )));
    }

    let grad_logits = logit_gradient(&cache.probs, labels, train_idx, weights, objective)?;
    let grad_t1 = a_hat.spmm(&grad_logits)?;

    let mut gw1 = match &cache.hidden_mask {
        Some(mask) => {
            let mut dropped = cache.hidden.clone();
            for (v, m) in dropped.as_mut_slice().iter_mut().zip(mask) {
                *v *= m;
            }
            dropped.transpose_matmul(&grad_t1)?
        }
        None => cache.hidden.transpose_matmul(&grad_t1)?,
    };
    gw1.add_scaled(l2_lambda, &params.w1)?;

    let mut grad_hidden = grad_t1.matmul_transpose(&params.w1)?;
    if let Some(mask) = &cache.hidden_mask {
        for (g, m) in grad_hidden.as_mut_slice().iter_mut().zip(mask) {
            *g *= m;
        }
    }
    for (g, z) in grad_hidden
        .as_mut_slice()
        .iter_mut()
        .zip(cache.pre_activation.as_slice())
    {
        if *z <= 0.0 {
            *g = 0.0;
        }
    }
    let grad_t0 = a_hat.spmm(&grad_hidden)?;
    let mut gw0 = cache.input.transpose_matmul(&grad_t0)?;
    gw0.add_scaled(l2_lambda, &params.w0)?;

    Ok(ParamGrads { gw0, gw1 })
}
