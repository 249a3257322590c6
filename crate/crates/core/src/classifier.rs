//! The inference-side contract shared by response-curve evaluation,
//! accuracy measurement and test-time augmentation.

use crate::image::ImageU8;

/// Row-major `n × classes` logit matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Logits {
    classes: usize,
    data: Vec<f64>,
}

impl Logits {
    pub fn new(classes: usize, data: Vec<f64>) -> Self {
        assert!(
            classes > 0 && data.len().is_multiple_of(classes),
            "logit buffer shape"
        );
        Self { classes, data }
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.classes
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.classes..(i + 1) * self.classes]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn argmax_all(&self) -> Vec<usize> {
        (0..self.len()).map(|i| argmax(self.row(i))).collect()
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// A model evaluated in deterministic inference mode on raw images.
pub trait ImageClassifier: Sync {
    fn num_classes(&self) -> usize;

    fn logits(&self, images: &[ImageU8]) -> Logits;

    fn predict(&self, images: &[ImageU8]) -> Vec<usize> {
        self.logits(images).argmax_all()
    }
}

/// Top-1 accuracy. An empty set scores zero.
pub fn accuracy(model: &dyn ImageClassifier, images: &[ImageU8], labels: &[usize]) -> f64 {
    if images.is_empty() {
        return 0.0;
    }
    let correct = model
        .predict(images)
        .iter()
        .zip(labels)
        .filter(|(p, l)| p == l)
        .count();
    correct as f64 / images.len() as f64
}
