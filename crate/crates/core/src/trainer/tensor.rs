//! Dense NCHW batches and a thin GEMM wrapper.

use crate::data::Normalization;
use crate::error::{Error, Result};
use crate::image::{ImageU8, CHANNELS};
use crate::par;

/// Normalized input batch in NCHW order.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub n: usize,
    pub c: usize,
    pub h: usize,
    pub w: usize,
    pub data: Vec<f64>,
}

impl Batch {
    pub fn new(n: usize, c: usize, h: usize, w: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * c * h * w {
            return Err(Error::Config(format!(
                "batch buffer holds {} values, expected {n}x{c}x{h}x{w}",
                data.len()
            )));
        }
        Ok(Self { n, c, h, w, data })
    }

    pub fn zeros(n: usize, c: usize, h: usize, w: usize) -> Self {
        Self {
            n,
            c,
            h,
            w,
            data: vec![0.0; n * c * h * w],
        }
    }

    pub fn sample_len(&self) -> usize {
        self.c * self.h * self.w
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        let l = self.sample_len();
        &self.data[i * l..(i + 1) * l]
    }

    /// Normalizes equally-sized images into one batch.
    pub fn from_images(images: &[ImageU8], norm: &Normalization) -> Result<Self> {
        let (h, w) = match images.first() {
            Some(im) => (im.height(), im.width()),
            None => return Ok(Self::zeros(0, CHANNELS, 0, 0)),
        };
        if images.iter().any(|im| im.height() != h || im.width() != w) {
            return Err(Error::Dataset("images in a batch differ in size".into()));
        }
        let mut b = Self::zeros(images.len(), CHANNELS, h, w);
        let len = b.sample_len();
        par::for_each_chunk_mut(&mut b.data, len, |i, out| norm.apply_into(&images[i], out));
        Ok(b)
    }
}

/// `C = A·B + beta·C` on row-major buffers, where `A` is `m×k` and `B` is
/// `k×n`. A `true` transpose flag means the buffer stores the transpose.
#[allow(clippy::too_many_arguments)]
pub fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    a_t: bool,
    b: &[f64],
    b_t: bool,
    beta: f64,
    c: &mut [f64],
) {
    assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
    if m == 0 || n == 0 {
        return;
    }
    let (rsa, csa) = if a_t {
        (1, m as isize)
    } else {
        (k as isize, 1)
    };
    let (rsb, csb) = if b_t {
        (1, k as isize)
    } else {
        (n as isize, 1)
    };
    // SAFETY: the asserts above bound every index the strides can reach.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa,
            csa,
            b.as_ptr(),
            rsb,
            csb,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}
