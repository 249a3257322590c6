#![allow(dead_code)]

pub mod welch_reference;

use ctrla_core::image::ImageU8;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub fn random_image(rng: &mut impl Rng, h: usize, w: usize) -> ImageU8 {
    ImageU8::from_fn(h, w, |_, _, _| rng.gen()).unwrap()
}

/// Asymptotic Kolmogorov survival function with Stephens' small-sample
/// correction.
pub fn kolmogorov_sf(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample KS statistic and p-value against `cdf`.
pub fn ks_test(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len();
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d
            .max((i + 1) as f64 / n as f64 - f)
            .max(f - i as f64 / n as f64);
    }
    (d, kolmogorov_sf(d, n))
}

/// Pearson χ² goodness of fit against equal cell probabilities.
pub fn chi2_uniform(counts: &[usize]) -> (f64, f64) {
    let total: usize = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64).unwrap();
    (stat, 1.0 - dist.cdf(stat))
}
