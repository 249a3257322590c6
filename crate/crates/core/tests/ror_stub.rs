//! Response-curve measurement against a stub model whose accuracy under
//! rotation is known in closed form.

use std::f64::consts::PI;

use ctrla_core::augpool::OperationKind;
use ctrla_core::classifier::{ImageClassifier, Logits};
use ctrla_core::data::Dataset;
use ctrla_core::image::ImageU8;
use ctrla_core::ror::{evaluate_ror_curve, fit_erf, RorConfig};
use ctrla_core::special::erf;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SIDE: usize = 21;
const CENTER: usize = SIDE / 2;
const MARKER_RADIUS: usize = 8;
const CLASSES: usize = 10;
const BASE_ACC: f64 = 0.8;
const DROP: f64 = 0.3;
const SCALE: f64 = 0.5;
const MAX_ROTATION: f64 = PI / 3.0;

/// Decodes the sample index from the center pixel (fixed under rotation)
/// and the rotation strength from the channel-0 marker centroid.
struct RotationSensitive {
    labels: Vec<usize>,
    base_ok: Vec<bool>,
    tolerance: Vec<f64>,
}

impl RotationSensitive {
    fn strength(img: &ImageU8) -> f64 {
        let (mut sx, mut sy) = (0.0, 0.0);
        for y in 0..SIDE {
            for x in 0..SIDE {
                let v = img.get(y, x, 0) as f64;
                sx += v * (x as f64 - CENTER as f64);
                sy += v * (y as f64 - CENTER as f64);
            }
        }
        (sy.atan2(sx).abs() / MAX_ROTATION).min(1.0)
    }

    fn predict_one(&self, img: &ImageU8) -> usize {
        let i = img.get(CENTER, CENTER, 1) as usize + 256 * img.get(CENTER, CENTER, 2) as usize;
        let g = Self::strength(img);
        let ok = self.base_ok[i] && self.tolerance[i] >= DROP * erf(g / SCALE);
        if ok {
            self.labels[i]
        } else {
            (self.labels[i] + 1) % CLASSES
        }
    }
}

impl ImageClassifier for RotationSensitive {
    fn num_classes(&self) -> usize {
        CLASSES
    }

    fn logits(&self, images: &[ImageU8]) -> Logits {
        let mut data = vec![0.0; images.len() * CLASSES];
        for (k, img) in images.iter().enumerate() {
            data[k * CLASSES + self.predict_one(img)] = 1.0;
        }
        Logits::new(CLASSES, data)
    }
}

fn fixture(n: usize) -> (RotationSensitive, Dataset) {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..CLASSES)).collect();
    let images = (0..n)
        .map(|i| {
            ImageU8::from_fn(SIDE, SIDE, |y, x, c| match c {
                0 => {
                    if (y, x) == (CENTER, CENTER + MARKER_RADIUS) {
                        255
                    } else {
                        0
                    }
                }
                1 => (i % 256) as u8,
                _ => (i / 256) as u8,
            })
            .unwrap()
        })
        .collect();
    let model = RotationSensitive {
        base_ok: (0..n).map(|_| rng.gen_bool(BASE_ACC)).collect(),
        tolerance: (0..n).map(|_| rng.gen()).collect(),
        labels: labels.clone(),
    };
    (model, Dataset::new(images, labels, CLASSES).unwrap())
}

#[test]
fn rotation_curve_tracks_the_designed_response() {
    let n = 2000;
    let (model, val) = fixture(n);
    let cfg = RorConfig::default();
    let curve = evaluate_ror_curve(&model, &val, OperationKind::Rotation, &cfg).unwrap();
    let base = curve.base_accuracy;
    assert!((base - BASE_ACC).abs() < 3.0 * (BASE_ACC * (1.0 - BASE_ACC) / n as f64).sqrt());
    assert_eq!(curve.points[0], (0.0, 1.0));
    for &(g, r) in &curve.points[1..] {
        let expect = 1.0 - DROP * erf(g / SCALE);
        let acc = expect * base;
        let sigma = (acc * (1.0 - acc) / n as f64).sqrt() / base;
        assert!(
            (r - expect).abs() < 3.0 * sigma,
            "γ={g}: R={r:.4}, expected {expect:.4} ± {:.4}",
            3.0 * sigma
        );
    }
    let fit = fit_erf(&curve).unwrap();
    assert!((fit.amplitude - DROP).abs() < 0.05, "A={}", fit.amplitude);
    assert!((fit.scale - SCALE).abs() < 0.1, "B={}", fit.scale);
}

#[test]
fn evaluation_is_reproducible() {
    let (model, val) = fixture(300);
    let cfg = RorConfig {
        sign_seed: 5,
        ..RorConfig::default()
    };
    let a = evaluate_ror_curve(&model, &val, OperationKind::Rotation, &cfg).unwrap();
    let b = evaluate_ror_curve(&model, &val, OperationKind::Rotation, &cfg).unwrap();
    assert_eq!(a, b);
}
