//! Test-time augmentation and run-level statistics.

use serde::{Deserialize, Serialize};

use crate::classifier::{argmax, ImageClassifier, Logits};
use crate::error::{Error, Result};
use crate::image::ImageU8;
use crate::special::{student_t_quantile, student_t_sf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TtaMode {
    /// Plain evaluation.
    #[default]
    None,
    Hflip,
    Invert,
}

impl TtaMode {
    pub fn transform(self, img: &ImageU8) -> ImageU8 {
        match self {
            TtaMode::None => img.clone(),
            TtaMode::Hflip => img.flip_horizontal(),
            TtaMode::Invert => img.invert(),
        }
    }
}

/// Logits averaged over each image and its transformed counterpart.
pub fn tta_logits(model: &dyn ImageClassifier, images: &[ImageU8], mode: TtaMode) -> Logits {
    let plain = model.logits(images);
    if mode == TtaMode::None {
        return plain;
    }
    let transformed: Vec<_> = images.iter().map(|im| mode.transform(im)).collect();
    let other = model.logits(&transformed);
    let data = plain
        .as_slice()
        .iter()
        .zip(other.as_slice())
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    Logits::new(plain.classes(), data)
}

pub fn tta_predict(model: &dyn ImageClassifier, img: &ImageU8, mode: TtaMode) -> usize {
    argmax(tta_logits(model, std::slice::from_ref(img), mode).row(0))
}

pub fn tta_accuracy(
    model: &dyn ImageClassifier,
    images: &[ImageU8],
    labels: &[usize],
    mode: TtaMode,
) -> f64 {
    if images.is_empty() {
        return 0.0;
    }
    let preds = tta_logits(model, images, mode).argmax_all();
    preds.iter().zip(labels).filter(|(p, l)| p == l).count() as f64 / images.len() as f64
}

/// `sqrt(acc·(1 − acc)/n)`.
pub fn binomial_stderr(accuracy: f64, n_samples: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&accuracy) || n_samples == 0 {
        return Err(Error::Statistics(format!(
            "binomial stderr needs accuracy in [0, 1] and n >= 1, got ({accuracy}, {n_samples})"
        )));
    }
    Ok((accuracy * (1.0 - accuracy) / n_samples as f64).sqrt())
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    if xs.iter().all(|&x| x == xs[0]) {
        return (xs[0], 0.0);
    }
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchResult {
    pub t: f64,
    pub df: f64,
    /// `P(T > t)`: small values favour `E[a] > E[b]`.
    pub p: f64,
}

/// One-sided Welch test of `H0: E[a] <= E[b]` against `H1: E[a] > E[b]`.
pub fn welch_one_sided(a: &[f64], b: &[f64]) -> Result<WelchResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Statistics(format!(
            "Welch test needs at least two values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Statistics(
            "Welch test input contains non-finite values".into(),
        ));
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se2 = sa + sb;
    if se2 == 0.0 {
        let df = (a.len() + b.len() - 2) as f64;
        let (t, p) = match ma.partial_cmp(&mb) {
            Some(std::cmp::Ordering::Greater) => (f64::INFINITY, 0.0),
            Some(std::cmp::Ordering::Less) => (f64::NEG_INFINITY, 1.0),
            _ => (0.0, 0.5),
        };
        return Ok(WelchResult { t, df, p });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (a.len() - 1) as f64 + sb * sb / (b.len() - 1) as f64);
    Ok(WelchResult {
        t,
        df,
        p: student_t_sf(t, df),
    })
}

/// Mean and two-sided 95% t-interval halfwidth over runs.
pub fn t_interval_halfwidth(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return Err(Error::Statistics(format!(
            "t-interval needs at least two runs, got {}",
            xs.len()
        )));
    }
    let (m, v) = mean_var(xs);
    let n = xs.len() as f64;
    Ok((m, student_t_quantile(0.975, n - 1.0) * (v / n).sqrt()))
}
