use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::{GcnParams, ParamGrads};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

/// First and second moment estimates plus the step counter.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    m0: Matrix,
    v0: Matrix,
    m1: Matrix,
    v1: Matrix,
    step: u32,
}

impl AdamState {
    pub fn new(params: &GcnParams) -> Self {
        let (f, h, c) = (
            params.num_features(),
            params.hidden_dim(),
            params.num_classes(),
        );
        Self {
            m0: Matrix::zeros(f, h),
            v0: Matrix::zeros(f, h),
            m1: Matrix::zeros(h, c),
            v1: Matrix::zeros(h, c),
            step: 0,
        }
    }

    pub fn step(&self) -> u32 {
        self.step
    }
}

fn update(param: &mut Matrix, grad: &Matrix, m: &mut Matrix, v: &mut Matrix, lr: f64, step: i32) {
    let bias1 = 1.0 - ADAM_BETA1.powi(step);
    let bias2 = 1.0 - ADAM_BETA2.powi(step);
    let slots = param
        .as_mut_slice()
        .iter_mut()
        .zip(grad.as_slice())
        .zip(m.as_mut_slice().iter_mut().zip(v.as_mut_slice()));
    for ((p, &g), (m, v)) in slots {
        *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
        *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
        let m_hat = *m / bias1;
        let v_hat = *v / bias2;
        *p -= lr * m_hat / (v_hat.sqrt() + ADAM_EPSILON);
    }
}

/// One bias-corrected Adam update of both weight matrices, in place.
pub fn adam_step(
    params: &mut GcnParams,
    grads: &ParamGrads,
    state: &mut AdamState,
    learning_rate: f64,
) -> Result<()> {
    if grads.gw0.shape() != params.w0.shape()
        || grads.gw1.shape() != params.w1.shape()
        || state.m0.shape() != params.w0.shape()
        || state.m1.shape() != params.w1.shape()
    {
        return Err(Error::DimensionMismatch(
            "adam state, gradients and params disagree".into(),
        ));
    }
    state.step += 1;
    let step = state.step as i32;
    update(
        &mut params.w0,
        &grads.gw0,
        &mut state.m0,
        &mut state.v0,
        learning_rate,
        step,
    );
    update(
        &mut params.w1,
        &grads.gw1,
        &mut state.m1,
        &mut state.v1,
        learning_rate,
        step,
    );
    Ok(())
}
