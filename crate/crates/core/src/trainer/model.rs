//! The trainable-classifier contract and the linear reference model.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::convnet::SmallConvNet;
use super::tensor::{gemm, Batch};
use crate::classifier::Logits;
use crate::rng::{counter_rng, Stream};

/// A named tensor with its gradient buffer. Non-trainable tensors (batch
/// norm running statistics) are persisted but never optimized.
#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub shape: Vec<usize>,
    pub value: Vec<f64>,
    pub grad: Vec<f64>,
    pub trainable: bool,
}

impl Param {
    pub fn zeros(name: &str, shape: &[usize], trainable: bool) -> Self {
        let len = shape.iter().product();
        Self {
            name: name.to_string(),
            shape: shape.to_vec(),
            value: vec![0.0; len],
            grad: vec![0.0; len],
            trainable,
        }
    }

    pub fn filled(name: &str, shape: &[usize], v: f64, trainable: bool) -> Self {
        let mut p = Self::zeros(name, shape, trainable);
        p.value.fill(v);
        p
    }

    /// Gaussian entries with standard deviation `std`.
    pub fn normal(name: &str, shape: &[usize], std: f64, seed: u64, index: u64) -> Self {
        let mut p = Self::zeros(name, shape, true);
        let mut rng = counter_rng(seed, Stream::Init, 0, index);
        for v in &mut p.value {
            let z: f64 = rng.sample(StandardNormal);
            *v = std * z;
        }
        p
    }

    /// Uniform entries on `[-bound, bound]`.
    pub fn uniform(name: &str, shape: &[usize], bound: f64, seed: u64, index: u64) -> Self {
        let mut p = Self::zeros(name, shape, true);
        let mut rng = counter_rng(seed, Stream::Init, 0, index);
        for v in &mut p.value {
            *v = rng.gen_range(-bound..=bound);
        }
        p
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }
}

/// A model trained on normalized NCHW batches.
pub trait Classifier: Send + Sync {
    fn num_classes(&self) -> usize;

    /// Evaluation-mode logits; deterministic for fixed weights.
    fn forward(&self, x: &Batch) -> Logits;

    /// Training-mode mean cross-entropy without touching any state.
    fn train_loss(&self, x: &Batch, labels: &[usize]) -> f64;

    /// Training-mode loss; overwrites every trainable gradient and advances
    /// running statistics.
    fn loss_and_grad(&mut self, x: &Batch, labels: &[usize]) -> f64;

    fn params(&self) -> Vec<&Param>;

    fn params_mut(&mut self) -> Vec<&mut Param>;

    fn trainable_count(&self) -> usize {
        self.params()
            .iter()
            .filter(|p| p.trainable)
            .map(|p| p.len())
            .sum()
    }
}

/// Mean softmax cross-entropy over rows and its gradient w.r.t. the logits.
pub fn cross_entropy(logits: &[f64], classes: usize, labels: &[usize]) -> (f64, Vec<f64>) {
    let n = labels.len();
    let mut grad = vec![0.0; logits.len()];
    let mut total = 0.0;
    for (i, &y) in labels.iter().enumerate() {
        let row = &logits[i * classes..(i + 1) * classes];
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = row.iter().map(|v| (v - max).exp()).sum();
        let lse = max + sum.ln();
        total += lse - row[y];
        let g = &mut grad[i * classes..(i + 1) * classes];
        for (j, gv) in g.iter_mut().enumerate() {
            *gv = ((row[j] - lse).exp() - if j == y { 1.0 } else { 0.0 }) / n as f64;
        }
    }
    (total / n as f64, grad)
}

/// Mean evaluation-mode cross-entropy.
pub fn eval_loss(model: &dyn Classifier, x: &Batch, labels: &[usize]) -> f64 {
    let logits = model.forward(x);
    cross_entropy(logits.as_slice(), logits.classes(), labels).0
}

/// Flatten, then one affine map.
#[derive(Debug, Clone)]
pub struct LinearSoftmax {
    classes: usize,
    inputs: usize,
    weight: Param,
    bias: Param,
}

impl LinearSoftmax {
    pub fn new(inputs: usize, classes: usize, seed: u64) -> Self {
        let bound = 1.0 / (inputs as f64).sqrt();
        Self {
            classes,
            inputs,
            weight: Param::uniform("fc.weight", &[classes, inputs], bound, seed, 0),
            bias: Param::zeros("fc.bias", &[classes], true),
        }
    }

    fn logits(&self, x: &Batch) -> Vec<f64> {
        assert_eq!(x.sample_len(), self.inputs, "input size mismatch");
        let mut out = vec![0.0; x.n * self.classes];
        for row in out.chunks_exact_mut(self.classes) {
            row.copy_from_slice(&self.bias.value);
        }
        gemm(
            x.n,
            self.inputs,
            self.classes,
            &x.data,
            false,
            &self.weight.value,
            true,
            1.0,
            &mut out,
        );
        out
    }
}

impl Classifier for LinearSoftmax {
    fn num_classes(&self) -> usize {
        self.classes
    }

    fn forward(&self, x: &Batch) -> Logits {
        Logits::new(self.classes, self.logits(x))
    }

    fn train_loss(&self, x: &Batch, labels: &[usize]) -> f64 {
        cross_entropy(&self.logits(x), self.classes, labels).0
    }

    fn loss_and_grad(&mut self, x: &Batch, labels: &[usize]) -> f64 {
        let (loss, dlogits) = cross_entropy(&self.logits(x), self.classes, labels);
        gemm(
            self.classes,
            x.n,
            self.inputs,
            &dlogits,
            true,
            &x.data,
            false,
            0.0,
            &mut self.weight.grad,
        );
        self.bias.grad.fill(0.0);
        for row in dlogits.chunks_exact(self.classes) {
            for (g, d) in self.bias.grad.iter_mut().zip(row) {
                *g += d;
            }
        }
        loss
    }

    fn params(&self) -> Vec<&Param> {
        vec![&self.weight, &self.bias]
    }

    fn params_mut(&mut self) -> Vec<&mut Param> {
        vec![&mut self.weight, &mut self.bias]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    LinearSoftmax,
    SmallConvNet,
}

/// Fresh model for `height × width` RGB inputs.
pub fn build_model(
    kind: ModelKind,
    classes: usize,
    height: usize,
    width: usize,
    seed: u64,
) -> Box<dyn Classifier> {
    match kind {
        ModelKind::LinearSoftmax => Box::new(LinearSoftmax::new(3 * height * width, classes, seed)),
        ModelKind::SmallConvNet => Box::new(SmallConvNet::new(classes, seed)),
    }
}
