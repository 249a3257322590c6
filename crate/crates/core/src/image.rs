//! Packed 8-bit RGB images.

use crate::error::{Error, Result};

pub const CHANNELS: usize = 3;

/// Height x width x 3 image with row-major, channel-interleaved pixels.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ImageU8 {
    height: usize,
    width: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for ImageU8 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImageU8")
            .field("height", &self.height)
            .field("width", &self.width)
            .finish_non_exhaustive()
    }
}

impl ImageU8 {
    pub fn new(height: usize, width: usize, data: Vec<u8>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::EmptyImage { height, width });
        }
        let expected = height * width * CHANNELS;
        if data.len() != expected {
            return Err(Error::PixelBufferLength {
                height,
                width,
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    /// Image filled with one RGB value.
    pub fn filled(height: usize, width: usize, rgb: [u8; 3]) -> Result<Self> {
        let data = rgb
            .iter()
            .copied()
            .cycle()
            .take(height * width * CHANNELS)
            .collect();
        Self::new(height, width, data)
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize, usize) -> u8,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * CHANNELS);
        for y in 0..height {
            for x in 0..width {
                for c in 0..CHANNELS {
                    data.push(f(y, x, c));
                }
            }
        }
        Self::new(height, width, data)
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> u8 {
        self.data[(y * self.width + x) * CHANNELS + c]
    }

    #[inline]
    pub fn pixel(&self, y: usize, x: usize) -> [u8; 3] {
        let i = (y * self.width + x) * CHANNELS;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Same dimensions, new pixel buffer. Length is checked by the caller.
    pub(crate) fn with_data(&self, data: Vec<u8>) -> Self {
        debug_assert_eq!(data.len(), self.data.len());
        Self {
            height: self.height,
            width: self.width,
            data,
        }
    }

    /// Apply `f` to every intensity.
    pub fn map(&self, f: impl Fn(u8) -> u8) -> Self {
        self.with_data(self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn flip_horizontal(&self) -> Self {
        let mut out = Vec::with_capacity(self.data.len());
        for y in 0..self.height {
            for x in (0..self.width).rev() {
                out.extend_from_slice(&self.pixel(y, x));
            }
        }
        self.with_data(out)
    }

    pub fn invert(&self) -> Self {
        self.map(|v| 255 - v)
    }
}

/// Round half away from zero and clamp into the 8-bit range.
#[inline]
pub fn to_u8(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    v.round().clamp(0.0, 255.0) as u8
}
