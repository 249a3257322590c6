//! CIFAR binary batches: per record a label byte (two for CIFAR-100,
//! coarse then fine) followed by 1024 red, 1024 green and 1024 blue bytes.

use std::path::{Path, PathBuf};

use super::Dataset;
use crate::error::{Error, Result};
use crate::image::ImageU8;

pub const CIFAR_SIDE: usize = 32;
pub const CIFAR_PIXELS: usize = CIFAR_SIDE * CIFAR_SIDE * 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CifarVariant {
    Cifar10,
    Cifar100,
}

impl CifarVariant {
    fn label_bytes(self) -> usize {
        match self {
            Self::Cifar10 => 1,
            Self::Cifar100 => 2,
        }
    }

    pub fn record_len(self) -> usize {
        self.label_bytes() + CIFAR_PIXELS
    }

    pub fn num_classes(self) -> usize {
        match self {
            Self::Cifar10 => 10,
            Self::Cifar100 => 100,
        }
    }

    fn files(self) -> (Vec<&'static str>, &'static str, &'static str) {
        match self {
            Self::Cifar10 => (
                vec![
                    "data_batch_1.bin",
                    "data_batch_2.bin",
                    "data_batch_3.bin",
                    "data_batch_4.bin",
                    "data_batch_5.bin",
                ],
                "test_batch.bin",
                "cifar-10-batches-bin",
            ),
            Self::Cifar100 => (vec!["train.bin"], "test.bin", "cifar-100-binary"),
        }
    }

    fn records_per_file(self, train: bool) -> usize {
        match (self, train) {
            (Self::Cifar10, _) => 10_000,
            (Self::Cifar100, true) => 50_000,
            (Self::Cifar100, false) => 10_000,
        }
    }
}

/// Decodes a buffer of whole records (any count).
pub fn parse_cifar_records(bytes: &[u8], variant: CifarVariant, origin: &str) -> Result<Dataset> {
    let rec = variant.record_len();
    if !bytes.len().is_multiple_of(rec) {
        let whole = bytes.len() / rec * rec;
        return Err(Error::Truncated {
            path: origin.to_string(),
            offset: whole as u64,
            expected: rec as u64,
            actual: (bytes.len() - whole) as u64,
        });
    }
    let plane = CIFAR_SIDE * CIFAR_SIDE;
    let mut images = Vec::with_capacity(bytes.len() / rec);
    let mut labels = Vec::with_capacity(bytes.len() / rec);
    for record in bytes.chunks_exact(rec) {
        let label = record[variant.label_bytes() - 1] as usize;
        let px = &record[variant.label_bytes()..];
        let mut data = Vec::with_capacity(CIFAR_PIXELS);
        for p in 0..plane {
            data.extend_from_slice(&[px[p], px[plane + p], px[2 * plane + p]]);
        }
        images.push(ImageU8::new(CIFAR_SIDE, CIFAR_SIDE, data)?);
        labels.push(label);
    }
    Dataset::new(images, labels, variant.num_classes())
}

fn read_exact_file(path: &Path, variant: CifarVariant, records: usize) -> Result<Dataset> {
    let bytes = std::fs::read(path)?;
    let expected = (records * variant.record_len()) as u64;
    if bytes.len() as u64 != expected {
        return Err(Error::Truncated {
            path: path.display().to_string(),
            offset: bytes.len().min(expected as usize) as u64,
            expected,
            actual: bytes.len() as u64,
        });
    }
    parse_cifar_records(&bytes, variant, &path.display().to_string())
}

fn resolve_dir(dir: &Path, variant: CifarVariant) -> PathBuf {
    let (train, _, nested) = variant.files();
    if !dir.join(train[0]).exists() && dir.join(nested).join(train[0]).exists() {
        dir.join(nested)
    } else {
        dir.to_path_buf()
    }
}

/// Loads the canonical train and test files from `dir` (or its
/// `cifar-10-batches-bin` / `cifar-100-binary` child).
pub fn load_cifar_binary(dir: &Path, variant: CifarVariant) -> Result<(Dataset, Dataset)> {
    let dir = resolve_dir(dir, variant);
    let (train_files, test_file, _) = variant.files();
    let mut images = Vec::new();
    let mut labels = Vec::new();
    for name in train_files {
        let part = read_exact_file(&dir.join(name), variant, variant.records_per_file(true))?;
        images.extend_from_slice(part.images());
        labels.extend_from_slice(part.labels());
    }
    let train = Dataset::new(images, labels, variant.num_classes())?;
    let test = read_exact_file(
        &dir.join(test_file),
        variant,
        variant.records_per_file(false),
    )?;
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_planar_decoding() {
        let mut rec = vec![7u8];
        rec.extend((0..1024).map(|i| (i % 256) as u8));
        rec.extend(std::iter::repeat_n(100, 1024));
        rec.extend(std::iter::repeat_n(200, 1024));
        let ds = parse_cifar_records(&rec, CifarVariant::Cifar10, "mem").unwrap();
        assert_eq!(ds.labels(), &[7]);
        let img = &ds.images()[0];
        assert_eq!(img.pixel(0, 5), [5, 100, 200]);
        assert_eq!(img.pixel(31, 31), [(1023 % 256) as u8, 100, 200]);
    }

    #[test]
    fn cifar100_uses_fine_label() {
        let mut rec = vec![3u8, 42u8];
        rec.extend(std::iter::repeat_n(0, CIFAR_PIXELS));
        let ds = parse_cifar_records(&rec, CifarVariant::Cifar100, "mem").unwrap();
        assert_eq!(ds.labels(), &[42]);
    }

    #[test]
    fn partial_record_reports_offset() {
        let bytes = vec![0u8; 3073 + 100];
        match parse_cifar_records(&bytes, CifarVariant::Cifar10, "x.bin") {
            Err(Error::Truncated {
                offset,
                expected,
                actual,
                ..
            }) => assert_eq!((offset, expected, actual), (3073, 3073, 100)),
            other => panic!("{other:?}"),
        }
    }
}
