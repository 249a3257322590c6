//! Datasets, validation splits and the auxiliary transform pipeline.

mod cifar;
mod pipeline;
mod png_io;
mod raw;
pub mod synthetic;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{ImageU8, CHANNELS};
use crate::rng::{counter_rng, Stream};

pub use cifar::{load_cifar_binary, parse_cifar_records, CifarVariant, CIFAR_PIXELS};
pub use pipeline::{cutout, pad_crop, post_stage, pre_stage, AuxFlags};
pub use png_io::{read_png, write_png};
pub use raw::{load_raw_container, read_raw_container, write_raw_container, RAW_MAGIC};

/// Labelled images sharing one shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    images: Vec<ImageU8>,
    labels: Vec<usize>,
    num_classes: usize,
}

impl Dataset {
    pub fn new(images: Vec<ImageU8>, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if images.len() != labels.len() {
            return Err(Error::Dataset(format!(
                "{} images but {} labels",
                images.len(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(Error::Dataset(format!(
                "label {bad} outside [0, {num_classes})"
            )));
        }
        if let Some(first) = images.first() {
            let shape = (first.height(), first.width());
            if images.iter().any(|im| (im.height(), im.width()) != shape) {
                return Err(Error::Dataset("images differ in shape".into()));
            }
        }
        Ok(Self {
            images,
            labels,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[ImageU8] {
        &self.images
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// `(height, width)` of the images, if any.
    pub fn shape(&self) -> Option<(usize, usize)> {
        self.images.first().map(|im| (im.height(), im.width()))
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            images: indices.iter().map(|&i| self.images[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            num_classes: self.num_classes,
        }
    }

    pub fn head(&self, n: usize) -> Self {
        let n = n.min(self.len());
        self.select(&(0..n).collect::<Vec<_>>())
    }

    /// Appends the horizontal mirror of every image, labels kept: image
    /// `k + len` mirrors image `k`.
    pub fn flip_doubled(&self) -> Self {
        let mut images = self.images.clone();
        images.extend(self.images.iter().map(ImageU8::flip_horizontal));
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&self.labels);
        Self {
            images,
            labels,
            num_classes: self.num_classes,
        }
    }

    /// Per-channel mean and standard deviation on the `[0, 1]` scale.
    pub fn channel_stats(&self) -> Normalization {
        let mut sum = [0.0f64; CHANNELS];
        let mut sq = [0.0f64; CHANNELS];
        let mut n = 0usize;
        for img in &self.images {
            for px in img.as_raw().chunks_exact(CHANNELS) {
                for c in 0..CHANNELS {
                    let v = px[c] as f64 / 255.0;
                    sum[c] += v;
                    sq[c] += v * v;
                }
                n += 1;
            }
        }
        if n == 0 {
            return Normalization::identity();
        }
        let mut mean = [0.0; CHANNELS];
        let mut std = [1.0; CHANNELS];
        for c in 0..CHANNELS {
            mean[c] = sum[c] / n as f64;
            let var = (sq[c] / n as f64 - mean[c] * mean[c]).max(0.0);
            std[c] = if var > 0.0 { var.sqrt() } else { 1.0 };
        }
        Normalization { mean, std }
    }
}

/// `(v/255 − mean) / std`, per channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mean: [f64; CHANNELS],
    pub std: [f64; CHANNELS],
}

impl Normalization {
    pub fn identity() -> Self {
        Self {
            mean: [0.0; CHANNELS],
            std: [1.0; CHANNELS],
        }
    }

    /// Statistics shared by an image and its inversion: mean 0.5, same std.
    pub fn inversion_aware(&self) -> Self {
        Self {
            mean: [0.5; CHANNELS],
            std: self.std,
        }
    }

    /// Writes the channel-planar (CHW) tensor of `img` into `out`.
    pub fn apply_into(&self, img: &ImageU8, out: &mut [f64]) {
        let plane = img.height() * img.width();
        debug_assert_eq!(out.len(), plane * CHANNELS);
        for (p, px) in img.as_raw().chunks_exact(CHANNELS).enumerate() {
            for c in 0..CHANNELS {
                out[c * plane + p] = (px[c] as f64 / 255.0 - self.mean[c]) / self.std[c];
            }
        }
    }

    pub fn apply(&self, img: &ImageU8) -> Vec<f64> {
        let mut out = vec![0.0; img.height() * img.width() * CHANNELS];
        self.apply_into(img, &mut out);
        out
    }

    /// Inverse map back to 8-bit pixels.
    pub fn invert(&self, tensor: &[f64], height: usize, width: usize) -> Result<ImageU8> {
        let plane = height * width;
        ImageU8::from_fn(height, width, |y, x, c| {
            let v = (tensor[c * plane + y * width + x] * self.std[c] + self.mean[c]) * 255.0;
            crate::image::to_u8(v)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMode {
    /// Validation = first `val_size` test images; the test set is kept whole.
    ValFromTestHead,
    /// Validation = seeded random sample removed from the training set.
    ValFromTrainRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub mode: SplitMode,
    #[serde(default = "default_val_size")]
    pub val_size: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_val_size() -> usize {
    1000
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            mode: SplitMode::ValFromTestHead,
            val_size: default_val_size(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Splits {
    pub train: Dataset,
    pub val: Dataset,
    pub test: Dataset,
    /// Source indices of the validation images (into test or train).
    pub val_indices: Vec<usize>,
}

pub fn make_splits(train: &Dataset, test: &Dataset, spec: &SplitSpec) -> Result<Splits> {
    let source_len = match spec.mode {
        SplitMode::ValFromTestHead => test.len(),
        SplitMode::ValFromTrainRandom => train.len(),
    };
    if spec.val_size == 0 || spec.val_size >= source_len {
        return Err(Error::Split(format!(
            "val_size {} must be in 1..{source_len}",
            spec.val_size
        )));
    }
    match spec.mode {
        SplitMode::ValFromTestHead => {
            let val_indices: Vec<usize> = (0..spec.val_size).collect();
            Ok(Splits {
                train: train.clone(),
                val: test.select(&val_indices),
                test: test.clone(),
                val_indices,
            })
        }
        SplitMode::ValFromTrainRandom => {
            let mut order: Vec<usize> = (0..train.len()).collect();
            order.shuffle(&mut counter_rng(spec.seed, Stream::Split, 0, 0));
            let val_indices = order[..spec.val_size].to_vec();
            let mut in_val = vec![false; train.len()];
            for &i in &val_indices {
                in_val[i] = true;
            }
            let keep: Vec<usize> = (0..train.len()).filter(|&i| !in_val[i]).collect();
            Ok(Splits {
                train: train.select(&keep),
                val: train.select(&val_indices),
                test: test.clone(),
                val_indices,
            })
        }
    }
}
