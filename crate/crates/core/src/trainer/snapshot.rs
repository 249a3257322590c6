//! `CTRLA1` parameter snapshots: the magic bytes followed by tensors
//! written as `u32 name_len, name, u32 rank, u32 dims…, f32 values…`,
//! all little-endian, until end of file.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use super::model::Classifier;
use crate::error::{Error, Result};

pub const SNAPSHOT_MAGIC: &[u8; 6] = b"CTRLA1";

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub values: Vec<f32>,
}

pub fn write_snapshot<W: Write>(model: &dyn Classifier, mut out: W) -> Result<()> {
    out.write_all(SNAPSHOT_MAGIC)?;
    for p in model.params() {
        out.write_all(&(p.name.len() as u32).to_le_bytes())?;
        out.write_all(p.name.as_bytes())?;
        out.write_all(&(p.shape.len() as u32).to_le_bytes())?;
        for &d in &p.shape {
            out.write_all(&(d as u32).to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(p.len() * 4);
        for &v in &p.value {
            buf.extend_from_slice(&(v as f32).to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    Ok(())
}

pub fn save_snapshot(model: &dyn Classifier, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(f);
    write_snapshot(model, &mut w)?;
    w.flush()?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    origin: &'a str,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Truncated {
                path: self.origin.to_string(),
                offset: self.pos as u64,
                expected: n as u64,
                actual: (self.bytes.len() - self.pos) as u64,
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<usize> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
    }
}

pub fn parse_snapshot(bytes: &[u8], origin: &str) -> Result<Vec<Tensor>> {
    if !bytes.starts_with(SNAPSHOT_MAGIC) {
        return Err(Error::BadMagic { expected: "CTRLA1" });
    }
    let mut cur = Cursor {
        bytes,
        pos: SNAPSHOT_MAGIC.len(),
        origin,
    };
    let mut out = Vec::new();
    while cur.pos < bytes.len() {
        let len = cur.u32()?;
        let name = String::from_utf8(cur.take(len)?.to_vec())
            .map_err(|_| Error::Snapshot(format!("{origin}: tensor name is not UTF-8")))?;
        let rank = cur.u32()?;
        let shape = (0..rank).map(|_| cur.u32()).collect::<Result<Vec<_>>>()?;
        let count = shape
            .iter()
            .try_fold(1usize, |a, &d| a.checked_mul(d))
            .and_then(|c| c.checked_mul(4))
            .ok_or_else(|| Error::Snapshot(format!("{origin}: tensor {name} is too large")))?;
        let values = cur
            .take(count)?
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        out.push(Tensor {
            name,
            shape,
            values,
        });
    }
    Ok(out)
}

/// Copies every model tensor from the snapshot; names and shapes must match.
pub fn restore_snapshot(model: &mut dyn Classifier, tensors: &[Tensor]) -> Result<()> {
    let by_name: HashMap<&str, &Tensor> = tensors.iter().map(|t| (t.name.as_str(), t)).collect();
    for p in model.params_mut() {
        let t = by_name
            .get(p.name.as_str())
            .ok_or_else(|| Error::Snapshot(format!("tensor {} missing from snapshot", p.name)))?;
        if t.shape != p.shape {
            return Err(Error::Snapshot(format!(
                "tensor {} has shape {:?}, model expects {:?}",
                p.name, t.shape, p.shape
            )));
        }
        for (v, &s) in p.value.iter_mut().zip(&t.values) {
            *v = s as f64;
        }
    }
    Ok(())
}

pub fn load_snapshot(model: &mut dyn Classifier, path: &Path) -> Result<()> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let tensors = parse_snapshot(&bytes, &path.display().to_string())?;
    restore_snapshot(model, &tensors)
}
