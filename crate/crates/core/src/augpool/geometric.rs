//! Affine warps: inverse-mapped bilinear sampling about the image center,
//! black outside the source.

use crate::image::{to_u8, ImageU8, CHANNELS};

/// Integer shift; content moves by `(dx, dy)` pixels.
pub(super) fn translate(img: &ImageU8, dx: i64, dy: i64) -> ImageU8 {
    let (h, w) = (img.height() as i64, img.width() as i64);
    let src = img.as_raw();
    let mut out = vec![0u8; src.len()];
    for y in 0..h {
        let sy = y - dy;
        if !(0..h).contains(&sy) {
            continue;
        }
        for x in 0..w {
            let sx = x - dx;
            if !(0..w).contains(&sx) {
                continue;
            }
            let o = ((y * w + x) as usize) * CHANNELS;
            let s = ((sy * w + sx) as usize) * CHANNELS;
            out[o..o + CHANNELS].copy_from_slice(&src[s..s + CHANNELS]);
        }
    }
    img.with_data(out)
}

/// Horizontal shear by `angle` radians: rows below the center move right.
pub(super) fn shear_x(img: &ImageU8, angle: f64) -> ImageU8 {
    let t = angle.tan();
    warp(img, |dx, dy| (dx - t * dy, dy))
}

/// Vertical shear by `angle` radians: columns right of the center move down.
pub(super) fn shear_y(img: &ImageU8, angle: f64) -> ImageU8 {
    let t = angle.tan();
    warp(img, |dx, dy| (dx, dy - t * dx))
}

/// Zoom about the center; factors below one leave black borders.
pub(super) fn scale(img: &ImageU8, factor: f64) -> ImageU8 {
    warp(img, |dx, dy| (dx / factor, dy / factor))
}

/// Rotation by `angle` radians, counter-clockwise as displayed (y down).
pub(super) fn rotate(img: &ImageU8, angle: f64) -> ImageU8 {
    let (s, c) = angle.sin_cos();
    warp(img, |dx, dy| (c * dx - s * dy, s * dx + c * dy))
}

/// `inverse` maps an output offset from the center to a source offset.
fn warp(img: &ImageU8, inverse: impl Fn(f64, f64) -> (f64, f64)) -> ImageU8 {
    let (h, w) = (img.height(), img.width());
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    let mut out = Vec::with_capacity(h * w * CHANNELS);
    for y in 0..h {
        for x in 0..w {
            let (sx, sy) = inverse(x as f64 - cx, y as f64 - cy);
            let px = bilinear(img, sx + cx, sy + cy);
            out.extend(px.iter().map(|&v| to_u8(v)));
        }
    }
    img.with_data(out)
}

fn bilinear(img: &ImageU8, x: f64, y: f64) -> [f64; 3] {
    let (h, w) = (img.height() as i64, img.width() as i64);
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let (x0, y0) = (x0 as i64, y0 as i64);
    let mut acc = [0.0; 3];
    for (oy, wy) in [(0, 1.0 - fy), (1, fy)] {
        let yy = y0 + oy;
        if wy == 0.0 || !(0..h).contains(&yy) {
            continue;
        }
        for (ox, wx) in [(0, 1.0 - fx), (1, fx)] {
            let xx = x0 + ox;
            if wx == 0.0 || !(0..w).contains(&xx) {
                continue;
            }
            let p = img.pixel(yy as usize, xx as usize);
            for c in 0..CHANNELS {
                acc[c] += wy * wx * p[c] as f64;
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn impulse(h: usize, w: usize, y0: usize, x0: usize) -> ImageU8 {
        ImageU8::from_fn(h, w, |y, x, _| if (y, x) == (y0, x0) { 255 } else { 0 }).unwrap()
    }

    fn bright_positions(img: &ImageU8) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for y in 0..img.height() {
            for x in 0..img.width() {
                if img.get(y, x, 0) > 127 {
                    v.push((y, x));
                }
            }
        }
        v
    }

    #[test]
    fn translate_moves_and_fills_black() {
        let img = impulse(5, 6, 2, 1);
        assert_eq!(bright_positions(&translate(&img, 3, 0)), vec![(2, 4)]);
        assert_eq!(bright_positions(&translate(&img, 0, -2)), vec![(0, 1)]);
        assert!(bright_positions(&translate(&img, 6, 0)).is_empty());
    }

    #[test]
    fn quarter_turn_maps_right_to_top() {
        // 7x7 with integer center (3, 3): a pixel right of center ends up above it.
        let img = impulse(7, 7, 3, 5);
        let out = rotate(&img, std::f64::consts::FRAC_PI_2);
        assert_eq!(bright_positions(&out), vec![(1, 3)]);
    }

    #[test]
    fn sixty_degree_rotation_of_an_offset_point() {
        // Offset (dx, dy) = (4, 0) rotated CCW by 60° lands at (2, -2√3) ≈ (2, -3.46).
        let img = impulse(11, 11, 5, 9);
        let out = rotate(&img, 60f64.to_radians());
        let (mut best, mut at) = (0u8, (0, 0));
        for y in 0..11 {
            for x in 0..11 {
                if out.get(y, x, 0) > best {
                    best = out.get(y, x, 0);
                    at = (y, x);
                }
            }
        }
        assert_eq!(at, (5 - 3, 5 + 2));
    }

    #[test]
    fn shear_x_shifts_rows_by_offset_from_center() {
        // 45° shear: row two below center shifts right by two.
        let img = impulse(5, 9, 4, 4);
        let out = shear_x(&img, std::f64::consts::FRAC_PI_4);
        assert_eq!(bright_positions(&out), vec![(4, 6)]);
        let img = impulse(9, 5, 4, 4);
        let out = shear_y(&img, std::f64::consts::FRAC_PI_4);
        assert_eq!(bright_positions(&out), vec![(6, 4)]);
    }

    #[test]
    fn zoom_out_leaves_black_border() {
        let img = ImageU8::filled(8, 8, [200, 200, 200]).unwrap();
        let out = scale(&img, 0.5);
        assert_eq!(out.get(0, 0, 0), 0);
        assert_eq!(out.get(4, 4, 0), 200);
        let zoom_in = scale(&img, 1.5);
        assert!(zoom_in.as_raw().iter().all(|&v| v == 200));
    }

    #[test]
    fn unit_scale_is_exact() {
        let img = ImageU8::from_fn(6, 9, |y, x, c| (y * 40 + x * 3 + c) as u8).unwrap();
        assert_eq!(scale(&img, 1.0), img);
        assert_eq!(rotate(&img, 0.0), img);
        assert_eq!(shear_x(&img, 0.0), img);
    }
}
