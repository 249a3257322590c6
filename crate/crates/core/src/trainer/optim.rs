//! SGD with Nesterov momentum and the cosine learning-rate schedule.

use std::f64::consts::PI;

use super::model::Classifier;
use super::tensor::Batch;
use crate::error::{Error, Result};

/// `η(n) = η0/2 · (1 + cos(π(n − 1)/n_max))` for epochs `n = 1..=n_max`.
pub fn cosine_lr(epoch: usize, eta0: f64, n_max: usize) -> f64 {
    0.5 * eta0 * (1.0 + (PI * (epoch as f64 - 1.0) / n_max as f64).cos())
}

/// Weight decay is folded into the gradient: `g = ∇L + λθ`,
/// `v ← μv + g`, `θ ← θ − η(g + μv)`.
#[derive(Debug, Clone)]
pub struct SgdNesterov {
    pub momentum: f64,
    pub weight_decay: f64,
    velocity: Vec<Vec<f64>>,
}

impl SgdNesterov {
    pub fn new(momentum: f64, weight_decay: f64) -> Self {
        Self {
            momentum,
            weight_decay,
            velocity: Vec::new(),
        }
    }

    /// Applies the gradients currently stored in the model.
    pub fn apply(&mut self, model: &mut dyn Classifier, lr: f64) {
        let mut params = model.params_mut();
        params.retain(|p| p.trainable);
        if self.velocity.len() != params.len() {
            self.velocity = params.iter().map(|p| vec![0.0; p.len()]).collect();
        }
        let (mu, wd) = (self.momentum, self.weight_decay);
        for (p, v) in params.into_iter().zip(&mut self.velocity) {
            for ((theta, g), vel) in p.value.iter_mut().zip(&p.grad).zip(v.iter_mut()) {
                let g = g + wd * *theta;
                *vel = mu * *vel + g;
                *theta -= lr * (g + mu * *vel);
            }
        }
    }
}

/// One optimization step on a batch; returns the pre-update loss.
pub fn sgd_nesterov_step(
    model: &mut dyn Classifier,
    opt: &mut SgdNesterov,
    x: &Batch,
    labels: &[usize],
    lr: f64,
) -> Result<f64> {
    if x.n == 0 {
        return Err(Error::Config("empty training batch".into()));
    }
    let loss = model.loss_and_grad(x, labels);
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss {
            loss,
            epoch: 0,
            batch: 0,
        });
    }
    opt.apply(model, lr);
    Ok(loss)
}
