//! Appearance operations expressed as blends against a degenerate image.

use crate::image::{to_u8, ImageU8, CHANNELS};

const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

#[inline]
fn luma(p: [u8; 3]) -> f64 {
    LUMA[0] * p[0] as f64 + LUMA[1] * p[1] as f64 + LUMA[2] * p[2] as f64
}

/// Blend toward black: `factor · x`.
pub(super) fn brightness(img: &ImageU8, factor: f64) -> ImageU8 {
    img.map(|v| to_u8(factor * v as f64))
}

/// Blend toward the mean gray level of the image.
pub(super) fn contrast(img: &ImageU8, factor: f64) -> ImageU8 {
    let raw = img.as_raw();
    let n = (img.height() * img.width()) as f64;
    let mean = raw
        .chunks_exact(CHANNELS)
        .map(|p| luma([p[0], p[1], p[2]]))
        .sum::<f64>()
        / n;
    img.map(|v| to_u8(mean + factor * (v as f64 - mean)))
}

/// Blend toward the per-pixel grayscale value.
pub(super) fn saturation(img: &ImageU8, factor: f64) -> ImageU8 {
    let mut out = Vec::with_capacity(img.as_raw().len());
    for p in img.as_raw().chunks_exact(CHANNELS) {
        let g = luma([p[0], p[1], p[2]]);
        out.extend(p.iter().map(|&v| to_u8(g + factor * (v as f64 - g))));
    }
    img.with_data(out)
}

/// `blur + factor · (x − blur)` against a 3x3 box blur with clamped edges.
/// Factors above one sharpen (unsharp mask), below one blur.
pub(super) fn sharpness(img: &ImageU8, factor: f64) -> ImageU8 {
    let blurred = box_blur3(img);
    let out = img
        .as_raw()
        .iter()
        .zip(&blurred)
        .map(|(&v, &b)| to_u8(b + factor * (v as f64 - b)))
        .collect();
    img.with_data(out)
}

fn box_blur3(img: &ImageU8) -> Vec<f64> {
    let (h, w) = (img.height() as i64, img.width() as i64);
    let mut out = Vec::with_capacity(img.as_raw().len());
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0; 3];
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let yy = (y + dy).clamp(0, h - 1) as usize;
                    let xx = (x + dx).clamp(0, w - 1) as usize;
                    let p = img.pixel(yy, xx);
                    for c in 0..CHANNELS {
                        acc[c] += p[c] as f64;
                    }
                }
            }
            out.extend(acc.iter().map(|a| a / 9.0));
        }
    }
    out
}

/// Rotates hue by `fraction` of the full circle (0.5 is a half turn).
pub(super) fn hue_shift(img: &ImageU8, fraction: f64) -> ImageU8 {
    let mut out = Vec::with_capacity(img.as_raw().len());
    for p in img.as_raw().chunks_exact(CHANNELS) {
        let (h, s, v) = rgb_to_hsv(
            p[0] as f64 / 255.0,
            p[1] as f64 / 255.0,
            p[2] as f64 / 255.0,
        );
        let (r, g, b) = hsv_to_rgb((h + fraction).rem_euclid(1.0), s, v);
        out.extend([r, g, b].iter().map(|c| to_u8(c * 255.0)));
    }
    img.with_data(out)
}

/// Hue in `[0, 1)`, saturation and value in `[0, 1]`.
pub(crate) fn rgb_to_hsv(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    if delta == 0.0 {
        return (0.0, s, max);
    }
    let h = if max == r {
        ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        (b - r) / delta + 2.0
    } else {
        (r - g) / delta + 4.0
    };
    ((h / 6.0).rem_euclid(1.0), s, max)
}

pub(crate) fn hsv_to_rgb(h: f64, s: f64, v: f64) -> (f64, f64, f64) {
    let h6 = h * 6.0;
    let sector = h6.floor();
    let f = h6 - sector;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    match (sector as i64).rem_euclid(6) {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hsv_roundtrip_on_all_corners() {
        for r in [0u8, 64, 255] {
            for g in [0u8, 128, 255] {
                for b in [0u8, 32, 255] {
                    let (h, s, v) =
                        rgb_to_hsv(r as f64 / 255.0, g as f64 / 255.0, b as f64 / 255.0);
                    let (r2, g2, b2) = hsv_to_rgb(h, s, v);
                    assert_eq!(
                        [to_u8(r2 * 255.0), to_u8(g2 * 255.0), to_u8(b2 * 255.0)],
                        [r, g, b]
                    );
                }
            }
        }
    }

    #[test]
    fn half_turn_hue_maps_red_to_cyan() {
        let img = ImageU8::filled(2, 2, [255, 0, 0]).unwrap();
        assert_eq!(hue_shift(&img, 0.5).pixel(0, 0), [0, 255, 255]);
        assert_eq!(hue_shift(&img, -1.0 / 3.0).pixel(0, 0), [0, 0, 255]);
        let gray = ImageU8::filled(2, 2, [90, 90, 90]).unwrap();
        assert_eq!(hue_shift(&gray, 0.25), gray);
    }

    #[test]
    fn unit_factor_is_identity() {
        let img = ImageU8::from_fn(5, 4, |y, x, c| (y * 50 + x * 11 + c * 3) as u8).unwrap();
        assert_eq!(brightness(&img, 1.0), img);
        assert_eq!(contrast(&img, 1.0), img);
        assert_eq!(saturation(&img, 1.0), img);
        assert_eq!(sharpness(&img, 1.0), img);
    }

    #[test]
    fn brightness_and_contrast_scale_as_expected() {
        let img = ImageU8::filled(2, 2, [100, 200, 50]).unwrap();
        assert_eq!(brightness(&img, 0.1).pixel(0, 0), [10, 20, 5]);
        assert_eq!(brightness(&img, 1.9).pixel(0, 0), [190, 255, 95]);
        let gray = ImageU8::from_fn(1, 2, |_, x, _| if x == 0 { 100 } else { 200 }).unwrap();
        let low = contrast(&gray, 0.1);
        assert_eq!(low.pixel(0, 0), [145; 3]);
        assert_eq!(low.pixel(0, 1), [155; 3]);
    }

    #[test]
    fn zero_saturation_factor_yields_gray() {
        let img = ImageU8::filled(1, 1, [200, 100, 0]).unwrap();
        let g = saturation(&img, 0.0).pixel(0, 0);
        assert_eq!(g[0], g[1]);
        assert_eq!(g[1], g[2]);
    }

    #[test]
    fn blur_smooths_an_impulse() {
        let img = ImageU8::from_fn(3, 3, |y, x, _| if (y, x) == (1, 1) { 90 } else { 0 }).unwrap();
        let out = sharpness(&img, 0.1);
        // blur at center = 10; 10 + 0.1·80 = 18
        assert_eq!(out.get(1, 1, 0), 18);
        assert_eq!(out.get(0, 0, 0), 9);
    }
}
