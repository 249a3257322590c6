//! Intensity-level operations: solarize, posterize, autocontrast, equalize.

use crate::image::{to_u8, ImageU8, CHANNELS};

/// Intensities at or above this value are inverted.
pub fn solarize_threshold(gamma: f64) -> f64 {
    255.0 * (1.0 - gamma / 2.0)
}

/// Retained most-significant bits, `round(8(1 − γ/2))` clamped to `[1, 8]`.
pub fn posterize_bits(gamma: f64) -> u32 {
    // round-half-up; the argument is non-negative for γ ∈ [0, 1]
    let bits = (8.0 * (1.0 - gamma / 2.0) + 0.5).floor();
    bits.clamp(1.0, 8.0) as u32
}

pub(super) fn solarize(img: &ImageU8, threshold: f64) -> ImageU8 {
    img.map(|v| if v as f64 >= threshold { 255 - v } else { v })
}

pub(super) fn posterize(img: &ImageU8, bits: u32) -> ImageU8 {
    let mask = (0xFFu32 << (8 - bits)) as u8;
    img.map(|v| v & mask)
}

/// Per-channel linear stretch of `[min, max]` onto `[0, 255]`.
/// Constant channels are left untouched.
pub fn autocontrast(img: &ImageU8) -> ImageU8 {
    let raw = img.as_raw();
    let mut luts = [[0u8; 256]; CHANNELS];
    for (c, lut) in luts.iter_mut().enumerate() {
        let channel = raw.iter().skip(c).step_by(CHANNELS);
        let lo = channel.clone().copied().min().unwrap_or(0);
        let hi = channel.copied().max().unwrap_or(255);
        for (v, slot) in lut.iter_mut().enumerate() {
            *slot = if hi > lo {
                to_u8((v as f64 - lo as f64) * 255.0 / (hi - lo) as f64)
            } else {
                v as u8
            };
        }
    }
    apply_luts(img, &luts)
}

/// Per-channel histogram equalization (cumulative remap, the last occupied
/// bin excluded from the step size).
pub fn equalize(img: &ImageU8) -> ImageU8 {
    let raw = img.as_raw();
    let mut luts = [[0u8; 256]; CHANNELS];
    for (c, lut) in luts.iter_mut().enumerate() {
        let mut hist = [0usize; 256];
        for &v in raw.iter().skip(c).step_by(CHANNELS) {
            hist[v as usize] += 1;
        }
        let total: usize = hist.iter().sum();
        let last = hist.iter().rev().find(|&&n| n > 0).copied().unwrap_or(0);
        let step = (total - last) / 255;
        if step == 0 {
            for (v, slot) in lut.iter_mut().enumerate() {
                *slot = v as u8;
            }
            continue;
        }
        let mut n = step / 2;
        for (v, slot) in lut.iter_mut().enumerate() {
            *slot = (n / step).min(255) as u8;
            n += hist[v];
        }
    }
    apply_luts(img, &luts)
}

fn apply_luts(img: &ImageU8, luts: &[[u8; 256]; CHANNELS]) -> ImageU8 {
    let out = img
        .as_raw()
        .iter()
        .enumerate()
        .map(|(i, &v)| luts[i % CHANNELS][v as usize])
        .collect();
    img.with_data(out)
}

pub(super) fn blend(img: &ImageU8, target: &ImageU8, gamma: f64) -> ImageU8 {
    let out = img
        .as_raw()
        .iter()
        .zip(target.as_raw())
        .map(|(&x, &t)| to_u8((1.0 - gamma) * x as f64 + gamma * t as f64))
        .collect();
    img.with_data(out)
}
