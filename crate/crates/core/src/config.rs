//! Versioned JSON run configuration and the bundled setup presets.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{
    load_cifar_binary, load_raw_container, make_splits, synthetic, CifarVariant, Dataset,
    SplitSpec, Splits,
};
use crate::error::{Error, Result};
use crate::trainer::TrainConfig;

pub const SCHEMA_VERSION: u32 = 1;
/// Dataset root used when a config leaves `dataset.root` unset.
pub const DATA_DIR_ENV: &str = "CTRLA_DATA_DIR";

const PRESETS: [(&str, &str); 6] = [
    (
        "standard-cifar10",
        include_str!("../../../configs/presets/standard-cifar10.json"),
    ),
    (
        "modified-cifar10",
        include_str!("../../../configs/presets/modified-cifar10.json"),
    ),
    (
        "standard-cifar100",
        include_str!("../../../configs/presets/standard-cifar100.json"),
    ),
    (
        "modified-cifar100",
        include_str!("../../../configs/presets/modified-cifar100.json"),
    ),
    (
        "standard-svhn",
        include_str!("../../../configs/presets/standard-svhn.json"),
    ),
    (
        "modified-svhn",
        include_str!("../../../configs/presets/modified-svhn.json"),
    ),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Cifar10,
    Cifar100,
    /// `CARAW1` containers named by `train` and `test`.
    Raw,
    /// Generated stripe images; needs no files.
    Synthetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub train_size: usize,
    pub test_size: usize,
    pub classes: usize,
    pub side: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub format: DatasetFormat,
    #[serde(default)]
    pub root: Option<PathBuf>,
    #[serde(default)]
    pub train: Option<PathBuf>,
    #[serde(default)]
    pub test: Option<PathBuf>,
    /// Keep only the first `n` training images.
    #[serde(default)]
    pub train_subset: Option<usize>,
    #[serde(default)]
    pub synthetic: Option<SyntheticSpec>,
}

impl DatasetConfig {
    fn root(&self) -> Result<PathBuf> {
        if let Some(r) = &self.root {
            return Ok(r.clone());
        }
        std::env::var_os(DATA_DIR_ENV)
            .map(PathBuf::from)
            .ok_or_else(|| {
                Error::Config(format!(
                    "dataset.root is unset and {DATA_DIR_ENV} is not defined"
                ))
            })
    }

    fn resolve(&self, p: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
        let p = p
            .as_ref()
            .ok_or_else(|| Error::Config(format!("raw dataset needs a `{what}` path")))?;
        if p.is_absolute() {
            Ok(p.clone())
        } else {
            Ok(self.root()?.join(p))
        }
    }

    /// Loads `(train, test)`.
    pub fn load(&self) -> Result<(Dataset, Dataset)> {
        let (train, test) = match self.format {
            DatasetFormat::Cifar10 => load_cifar_binary(&self.root()?, CifarVariant::Cifar10)?,
            DatasetFormat::Cifar100 => load_cifar_binary(&self.root()?, CifarVariant::Cifar100)?,
            DatasetFormat::Raw => (
                load_raw_container(&self.resolve(&self.train, "train")?)?,
                load_raw_container(&self.resolve(&self.test, "test")?)?,
            ),
            DatasetFormat::Synthetic => {
                let s = self.synthetic.ok_or_else(|| {
                    Error::Config("synthetic dataset needs a `synthetic` block".into())
                })?;
                (
                    synthetic::stripes(s.train_size, s.classes, s.side, s.seed)?,
                    synthetic::stripes(s.test_size, s.classes, s.side, s.seed.wrapping_add(1))?,
                )
            }
        };
        let train = match self.train_subset {
            Some(n) if n < train.len() => train.head(n),
            _ => train,
        };
        Ok((train, test))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub preset: Option<String>,
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub split: SplitSpec,
    pub train: TrainConfig,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        match v.get("schema_version").and_then(|s| s.as_u64()) {
            Some(n) if n == SCHEMA_VERSION as u64 => {}
            other => {
                return Err(Error::Config(format!(
                    "unsupported schema_version {other:?}, expected {SCHEMA_VERSION}"
                )))
            }
        }
        let cfg: Self = serde_json::from_value(v)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn preset(name: &str) -> Result<Self> {
        let text = PRESETS
            .iter()
            .find(|p| p.0 == name)
            .map(|p| p.1)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown preset {name:?}; valid presets: {}",
                    preset_names().join(", ")
                ))
            })?;
        Self::from_json(text)
    }

    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        if self.dataset.format == DatasetFormat::Synthetic && self.dataset.synthetic.is_none() {
            return Err(Error::Config(
                "synthetic dataset needs a `synthetic` block".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load_splits(&self) -> Result<Splits> {
        let (train, test) = self.dataset.load()?;
        make_splits(&train, &test, &self.split)
    }
}
