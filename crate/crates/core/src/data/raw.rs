//! `CARAW1` container: magic, then little-endian u32 count, height, width,
//! class count, then per record one label byte and `height·width·3`
//! interleaved RGB bytes.

use std::io::Write;
use std::path::Path;

use super::Dataset;
use crate::error::{Error, Result};
use crate::image::{ImageU8, CHANNELS};

pub const RAW_MAGIC: &[u8; 6] = b"CARAW1";
const HEADER_LEN: usize = 6 + 4 * 4;

pub fn read_raw_container(bytes: &[u8], origin: &str) -> Result<Dataset> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated {
            path: origin.into(),
            offset: 0,
            expected: HEADER_LEN as u64,
            actual: bytes.len() as u64,
        });
    }
    if &bytes[..6] != RAW_MAGIC {
        return Err(Error::BadMagic { expected: "CARAW1" });
    }
    let word =
        |i: usize| u32::from_le_bytes(bytes[6 + 4 * i..10 + 4 * i].try_into().unwrap()) as usize;
    let (count, height, width, classes) = (word(0), word(1), word(2), word(3));
    if count == 0 {
        return Err(Error::Dataset(format!(
            "{origin}: container holds no records"
        )));
    }
    if height == 0 || width == 0 || classes == 0 || classes > 256 {
        return Err(Error::Dataset(format!(
            "{origin}: invalid header {height}x{width}, {classes} classes"
        )));
    }
    let record = height
        .checked_mul(width)
        .and_then(|v| v.checked_mul(CHANNELS))
        .and_then(|v| v.checked_add(1))
        .ok_or_else(|| Error::Dataset(format!("{origin}: dimensions overflow")))?;
    let body = record
        .checked_mul(count)
        .ok_or_else(|| Error::Dataset(format!("{origin}: dimensions overflow")))?;
    let expected = HEADER_LEN as u64 + body as u64;
    if bytes.len() as u64 != expected {
        return Err(Error::Truncated {
            path: origin.into(),
            offset: bytes.len().min(expected as usize) as u64,
            expected,
            actual: bytes.len() as u64,
        });
    }
    let mut images = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for rec in bytes[HEADER_LEN..].chunks_exact(record) {
        labels.push(rec[0] as usize);
        images.push(ImageU8::new(height, width, rec[1..].to_vec())?);
    }
    Dataset::new(images, labels, classes)
}

pub fn load_raw_container(path: &Path) -> Result<Dataset> {
    let bytes = std::fs::read(path)?;
    read_raw_container(&bytes, &path.display().to_string())
}

pub fn write_raw_container(ds: &Dataset, mut out: impl Write) -> Result<()> {
    let (h, w) = ds
        .shape()
        .ok_or_else(|| Error::Dataset("cannot write an empty container".into()))?;
    if ds.num_classes() > 256 {
        return Err(Error::Dataset("labels must fit one byte".into()));
    }
    out.write_all(RAW_MAGIC)?;
    for v in [ds.len(), h, w, ds.num_classes()] {
        let v = u32::try_from(v).map_err(|_| Error::Dataset("header field exceeds u32".into()))?;
        out.write_all(&v.to_le_bytes())?;
    }
    for (img, &label) in ds.images().iter().zip(ds.labels()) {
        out.write_all(&[label as u8])?;
        out.write_all(img.as_raw())?;
    }
    Ok(())
}
