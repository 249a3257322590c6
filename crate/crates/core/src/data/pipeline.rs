//! Auxiliary transforms around the pool operations. Stage order is fixed:
//! inversion, horizontal flip, pad-and-crop | pool ops | normalize, cutout.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Normalization;
use crate::error::{Error, Result};
use crate::image::{ImageU8, CHANNELS};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AuxFlags {
    /// Probability of pixel inversion; zero disables it.
    #[serde(default)]
    pub invert_prob: f64,
    /// Mirror with probability one half.
    #[serde(default)]
    pub random_hflip: bool,
    /// Zero-pad width before a random crop back to the input size.
    #[serde(default)]
    pub pad_crop: usize,
    /// Side of the square zeroed after normalization; zero disables it.
    #[serde(default)]
    pub cutout: usize,
}

/// Pixel-space transforms applied before the pool.
pub fn pre_stage<R: Rng + ?Sized>(img: &ImageU8, flags: &AuxFlags, rng: &mut R) -> ImageU8 {
    let mut out = std::borrow::Cow::Borrowed(img);
    if flags.invert_prob > 0.0 && rng.gen_bool(flags.invert_prob.min(1.0)) {
        out = std::borrow::Cow::Owned(out.invert());
    }
    if flags.random_hflip && rng.gen_bool(0.5) {
        out = std::borrow::Cow::Owned(out.flip_horizontal());
    }
    if flags.pad_crop > 0 {
        let span = 2 * flags.pad_crop;
        let oy = rng.gen_range(0..=span);
        let ox = rng.gen_range(0..=span);
        out = std::borrow::Cow::Owned(pad_crop(&out, flags.pad_crop, oy, ox));
    }
    out.into_owned()
}

/// Zero-pads by `pad` on every side, then crops the original size at
/// `(off_y, off_x)` in padded coordinates. `(pad, pad)` is the identity.
pub fn pad_crop(img: &ImageU8, pad: usize, off_y: usize, off_x: usize) -> ImageU8 {
    let (h, w) = (img.height() as i64, img.width() as i64);
    let (dy, dx) = (off_y as i64 - pad as i64, off_x as i64 - pad as i64);
    let mut out = vec![0u8; img.as_raw().len()];
    for y in 0..h {
        let sy = y + dy;
        if !(0..h).contains(&sy) {
            continue;
        }
        for x in 0..w {
            let sx = x + dx;
            if !(0..w).contains(&sx) {
                continue;
            }
            let o = ((y * w + x) as usize) * CHANNELS;
            out[o..o + CHANNELS].copy_from_slice(&img.pixel(sy as usize, sx as usize));
        }
    }
    img.with_data(out)
}

/// Normalizes into a CHW tensor, then applies cutout at a uniform center.
pub fn post_stage<R: Rng + ?Sized>(
    img: &ImageU8,
    norm: &Normalization,
    cutout_size: usize,
    rng: &mut R,
    out: &mut [f64],
) -> Result<()> {
    norm.apply_into(img, out);
    if cutout_size > 0 {
        let cy = rng.gen_range(0..img.height());
        let cx = rng.gen_range(0..img.width());
        cutout(out, img.height(), img.width(), cutout_size, cy, cx)?;
    }
    Ok(())
}

/// Zeroes a `size × size` square centred at `(cy, cx)` in every channel of
/// a CHW tensor, clipped at the borders. Returns the zeroed area per channel.
pub fn cutout(
    tensor: &mut [f64],
    height: usize,
    width: usize,
    size: usize,
    cy: usize,
    cx: usize,
) -> Result<usize> {
    if size > height || size > width {
        return Err(Error::Config(format!(
            "cutout size {size} exceeds image {height}x{width}"
        )));
    }
    let half = (size / 2) as i64;
    let y0 = (cy as i64 - half).max(0) as usize;
    let y1 = ((cy as i64 - half + size as i64).max(0) as usize).min(height);
    let x0 = (cx as i64 - half).max(0) as usize;
    let x1 = ((cx as i64 - half + size as i64).max(0) as usize).min(width);
    let plane = height * width;
    for c in 0..CHANNELS {
        for y in y0..y1 {
            let row = c * plane + y * width;
            tensor[row + x0..row + x1].fill(0.0);
        }
    }
    Ok((y1.saturating_sub(y0)) * (x1.saturating_sub(x0)))
}
