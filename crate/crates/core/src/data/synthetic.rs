//! Procedural labelled images for tests, demos and benchmarks when no real
//! dataset is at hand. Each class is a tinted stripe pattern with its own
//! orientation; phase, tint jitter and pixel noise vary per image.

use rand::Rng;

use super::Dataset;
use crate::error::Result;
use crate::image::{to_u8, ImageU8};
use crate::rng::{counter_rng, Stream};

pub fn stripes(n: usize, classes: usize, side: usize, seed: u64) -> Result<Dataset> {
    let mut images = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = counter_rng(seed, Stream::Synthetic, 0, i as u64);
        let label = rng.gen_range(0..classes);
        images.push(stripe_image(label, classes, side, &mut rng)?);
        labels.push(label);
    }
    Dataset::new(images, labels, classes)
}

fn stripe_image(label: usize, classes: usize, side: usize, rng: &mut impl Rng) -> Result<ImageU8> {
    let angle = std::f64::consts::PI * label as f64 / classes as f64;
    let (s, c) = angle.sin_cos();
    let freq = 2.0 * std::f64::consts::PI / (3.0 + (label % 3) as f64);
    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let hue = label as f64 / classes as f64;
    let tint = [
        0.5 + 0.4 * (std::f64::consts::TAU * hue).cos(),
        0.5 + 0.4 * (std::f64::consts::TAU * (hue + 1.0 / 3.0)).cos(),
        0.5 + 0.4 * (std::f64::consts::TAU * (hue + 2.0 / 3.0)).cos(),
    ];
    let jitter: f64 = rng.gen_range(-0.1..0.1);
    let noise: Vec<f64> = (0..side * side * 3)
        .map(|_| rng.gen_range(-25.0..25.0))
        .collect();
    ImageU8::from_fn(side, side, |y, x, ch| {
        let t = (x as f64 * c + y as f64 * s) * freq + phase;
        let v = 0.5 + 0.5 * t.sin();
        let level = 255.0 * (0.15 + 0.7 * v * (tint[ch] + jitter).clamp(0.0, 1.0));
        to_u8(level + noise[(y * side + x) * 3 + ch])
    })
}
