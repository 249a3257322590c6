use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use ctrla_core::config::{DatasetFormat, RunConfig};
use ctrla_core::evalstats::TtaMode;
use ctrla_core::trainer::{
    build_model, run_training, save_snapshot, AugMode, ModelKind, TrainingSummary,
};
use serde::{Deserialize, Serialize};

use crate::ConfigSource;

pub const PHASE_LOG: &str = "phases.jsonl";
pub const METRICS: &str = "metrics.json";
pub const SNAPSHOT: &str = "model.ctrla";
pub const RESOLVED_CONFIG: &str = "config.json";

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[command(flatten)]
    pub source: ConfigSource,
    /// Output directory; overrides the config value.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<AugMode>,
    #[arg(long, value_parser = parse_model)]
    pub model: Option<ModelKind>,
    /// Operations per sample.
    #[arg(long)]
    pub ops: Option<usize>,
    /// Loss-ratio setpoint.
    #[arg(long)]
    pub kappa_sp: Option<f64>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Recompute response curves every m-th phase.
    #[arg(long)]
    pub ror_period: Option<usize>,
}

fn parse_kebab<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn parse_mode(s: &str) -> Result<AugMode, String> {
    parse_kebab(s)
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    parse_kebab(s)
}

/// Final per-run metrics, the unit `report` aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub preset: Option<String>,
    pub dataset_format: DatasetFormat,
    pub model: ModelKind,
    pub mode: AugMode,
    pub epochs: usize,
    pub seed: u64,
    pub train_size: usize,
    pub val_accuracy: f64,
    pub test_accuracy: f64,
    pub test_tta_accuracy: f64,
    pub tta: TtaMode,
    pub ror_evaluations: usize,
    pub phases: usize,
    pub final_xi: Option<f64>,
}

impl RunMetrics {
    pub fn new(cfg: &RunConfig, s: &TrainingSummary) -> Self {
        Self {
            preset: cfg.preset.clone(),
            dataset_format: cfg.dataset.format,
            model: cfg.train.model,
            mode: cfg.train.mode,
            epochs: cfg.train.epochs,
            seed: s.seed,
            train_size: s.train_size,
            val_accuracy: s.val_accuracy,
            test_accuracy: s.test_accuracy,
            test_tta_accuracy: s.test_tta_accuracy,
            tta: s.tta,
            ror_evaluations: s.ror_evaluations,
            phases: s.phases.len(),
            final_xi: s.phases.last().and_then(|p| p.next_xi.or(Some(p.xi))),
        }
    }
}

fn apply_overrides(cfg: &mut RunConfig, a: &TrainArgs) {
    let t = &mut cfg.train;
    if let Some(v) = a.epochs {
        t.epochs = v;
    }
    if let Some(v) = a.seed {
        t.seed = v;
    }
    if let Some(v) = a.mode {
        t.mode = v;
    }
    if let Some(v) = a.model {
        t.model = v;
    }
    if let Some(v) = a.ops {
        t.ops_per_sample = v;
    }
    if let Some(v) = a.kappa_sp {
        t.kappa_sp = v;
    }
    if let Some(v) = a.lr {
        t.lr = v;
    }
    if let Some(v) = a.batch_size {
        t.batch_size = v;
    }
    if let Some(v) = a.ror_period {
        t.ror_period = v;
    }
    if let Some(o) = &a.output {
        cfg.output_dir = o.clone();
    }
}

pub fn run(a: TrainArgs) -> Result<()> {
    let mut cfg = a.source.resolve()?;
    apply_overrides(&mut cfg, &a);
    cfg.validate()?;
    let out = cfg.output_dir.clone();
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join(RESOLVED_CONFIG), cfg.to_json()?)?;

    let splits = cfg.load_splits().context("loading dataset")?;
    let (h, w) = splits.train.shape().context("training set is empty")?;
    log::info!(
        "train {} / val {} / test {} images of {h}x{w}, {} classes",
        splits.train.len(),
        splits.val.len(),
        splits.test.len(),
        splits.train.num_classes()
    );
    let mut model = build_model(
        cfg.train.model,
        splits.train.num_classes(),
        h,
        w,
        cfg.train.seed,
    );

    let log_path = out.join(PHASE_LOG);
    let mut log = BufWriter::new(
        File::create(&log_path).with_context(|| format!("creating {}", log_path.display()))?,
    );
    let summary = run_training(&cfg.train, &splits, model.as_mut(), &mut |rec| {
        serde_json::to_writer(&mut log, rec)?;
        log.write_all(b"\n")?;
        log.flush()?;
        Ok(())
    })
    .with_context(|| {
        format!(
            "training aborted; partial phase log kept at {}",
            log_path.display()
        )
    })?;

    save_snapshot(model.as_ref(), &out.join(SNAPSHOT))?;
    let metrics = RunMetrics::new(&cfg, &summary);
    fs::write(out.join(METRICS), serde_json::to_string_pretty(&metrics)?)?;
    log::info!(
        "done: val {:.4}, test {:.4}, test+tta {:.4}; outputs in {}",
        metrics.val_accuracy,
        metrics.test_accuracy,
        metrics.test_tta_accuracy,
        out.display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kebab_enums_parse() {
        assert_eq!(parse_mode("ctrl-a").unwrap(), AugMode::CtrlA);
        assert_eq!(parse_mode("none").unwrap(), AugMode::None);
        assert_eq!(
            parse_model("linear-softmax").unwrap(),
            ModelKind::LinearSoftmax
        );
        assert!(parse_mode("sometimes").is_err());
    }
}
