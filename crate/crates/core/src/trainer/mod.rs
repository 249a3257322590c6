//! Phase-partitioned training: the table and `ξ` are frozen for `n_p`
//! epochs, then the controller and the response curves refresh them.

mod convnet;
mod model;
mod optim;
mod snapshot;
mod tensor;

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use convnet::{SmallConvNet, WIDTHS};
pub use model::{
    build_model, cross_entropy, eval_loss, Classifier, LinearSoftmax, ModelKind, Param,
};
pub use optim::{cosine_lr, sgd_nesterov_step, SgdNesterov};
pub use snapshot::{
    load_snapshot, parse_snapshot, restore_snapshot, save_snapshot, write_snapshot, Tensor,
    SNAPSHOT_MAGIC,
};
pub use tensor::{gemm, Batch};

use crate::asd::{draw_plan, AsdTable, AugmentationPlan};
use crate::augpool::{compose_augment, K};
use crate::classifier::{accuracy, ImageClassifier, Logits};
use crate::controller::{compute_kappa, detect_saturation, update_xi, ControllerState, PhaseStats};
use crate::data::{post_stage, pre_stage, AuxFlags, Dataset, Normalization, Splits};
use crate::error::{Error, Result};
use crate::evalstats::{tta_accuracy, TtaMode};
use crate::image::{ImageU8, CHANNELS};
use crate::par;
use crate::rng::{counter_rng, Stream};
use crate::ror::{update_all, OpUpdate, RorConfig};

const EVAL_CHUNK: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AugMode {
    /// Closed loop: `ξ` tracks the loss-ratio setpoint.
    CtrlA,
    /// Constant table `(Γ, α)` for every operation.
    FixedTable,
    /// All-zero table on the same code path.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub model: ModelKind,
    pub epochs: usize,
    #[serde(default = "default_phase_epochs")]
    pub phase_epochs: usize,
    pub lr: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub ops_per_sample: usize,
    pub kappa_sp: f64,
    #[serde(default = "default_xi0")]
    pub xi0: f64,
    #[serde(default)]
    pub seed: u64,
    pub mode: AugMode,
    #[serde(default = "one")]
    pub fixed_gamma: f64,
    #[serde(default)]
    pub fixed_alpha: f64,
    #[serde(default)]
    pub aux: AuxFlags,
    /// Train on the set plus its mirror images.
    #[serde(default)]
    pub flip_doubling: bool,
    /// Normalize around 0.5 so an image and its inversion share statistics.
    #[serde(default)]
    pub inversion_aware_norm: bool,
    #[serde(default)]
    pub tta: TtaMode,
    /// Recompute response curves every `m`-th phase; `ξ` moves every phase.
    #[serde(default = "one_usize")]
    pub ror_period: usize,
    #[serde(default = "default_grid_step")]
    pub ror_grid_step: f64,
}

fn default_phase_epochs() -> usize {
    5
}
fn default_xi0() -> f64 {
    crate::controller::XI_INIT
}
fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn default_grid_step() -> f64 {
    0.1
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.epochs == 0 || self.phase_epochs == 0 || self.batch_size == 0 {
            return bad("epochs, phase_epochs and batch_size must be positive".into());
        }
        if !(1..=K).contains(&self.ops_per_sample) {
            return Err(Error::OpsPerSample {
                got: self.ops_per_sample,
                max: K,
            });
        }
        let lr_ok = self.lr.is_finite() && self.lr >= 0.0;
        let wd_ok = self.weight_decay.is_finite() && self.weight_decay >= 0.0;
        if !lr_ok || !(0.0..1.0).contains(&self.momentum) || !wd_ok {
            return bad(format!(
                "need lr >= 0, momentum in [0, 1), weight_decay >= 0; got {}, {}, {}",
                self.lr, self.momentum, self.weight_decay
            ));
        }
        if !(self.kappa_sp >= 0.0 && self.kappa_sp.is_finite()) || !(0.0..=1.0).contains(&self.xi0)
        {
            return bad(format!(
                "need kappa_sp >= 0 and xi0 in [0, 1]; got {}, {}",
                self.kappa_sp, self.xi0
            ));
        }
        if !(0.0..=1.0).contains(&self.fixed_gamma) || !(0.0..=1.0).contains(&self.fixed_alpha) {
            return bad("fixed_gamma and fixed_alpha must lie in [0, 1]".into());
        }
        if self.ror_period == 0 || !(self.ror_grid_step > 0.0 && self.ror_grid_step <= 1.0) {
            return bad("ror_period must be >= 1 and ror_grid_step in (0, 1]".into());
        }
        if !(0.0..=1.0).contains(&self.aux.invert_prob) {
            return bad("aux.invert_prob must lie in [0, 1]".into());
        }
        Ok(())
    }

    pub fn phase_count(&self) -> usize {
        self.epochs.div_ceil(self.phase_epochs)
    }

    pub fn initial_table(&self) -> AsdTable {
        match self.mode {
            AugMode::FixedTable => AsdTable::uniform(self.fixed_gamma, self.fixed_alpha),
            AugMode::CtrlA | AugMode::None => AsdTable::zeros(),
        }
    }
}

/// Evaluation-mode wrapper presenting a trained model to pixel-space code.
pub struct NormalizedModel<'a> {
    pub model: &'a dyn Classifier,
    pub norm: Normalization,
}

impl ImageClassifier for NormalizedModel<'_> {
    fn num_classes(&self) -> usize {
        self.model.num_classes()
    }

    fn logits(&self, images: &[ImageU8]) -> Logits {
        let classes = self.model.num_classes();
        let mut data = Vec::with_capacity(images.len() * classes);
        for chunk in images.chunks(EVAL_CHUNK) {
            let b =
                Batch::from_images(chunk, &self.norm).expect("evaluation images share one size");
            data.extend_from_slice(self.model.forward(&b).as_slice());
        }
        Logits::new(classes, data)
    }
}

pub fn evaluate_accuracy(model: &dyn Classifier, norm: &Normalization, ds: &Dataset) -> f64 {
    accuracy(
        &NormalizedModel { model, norm: *norm },
        ds.images(),
        ds.labels(),
    )
}

/// Mean evaluation-mode cross-entropy over a dataset.
pub fn dataset_loss(model: &dyn Classifier, norm: &Normalization, ds: &Dataset) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::Dataset(
            "cannot evaluate loss on an empty set".into(),
        ));
    }
    let mut total = 0.0;
    for (imgs, labels) in ds
        .images()
        .chunks(EVAL_CHUNK)
        .zip(ds.labels().chunks(EVAL_CHUNK))
    {
        let b = Batch::from_images(imgs, norm)?;
        total += eval_loss(model, &b, labels) * imgs.len() as f64;
    }
    Ok(total / ds.len() as f64)
}

/// The generator for sample `index` in global epoch `epoch`; the plan is
/// drawn first, then the auxiliary transforms consume it in stage order.
pub fn sample_rng(seed: u64, epoch: usize, index: usize) -> rand_chacha::ChaCha8Rng {
    counter_rng(seed, Stream::Augment, epoch as u64, index as u64)
}

pub fn sample_plan(
    seed: u64,
    epoch: usize,
    index: usize,
    table: &AsdTable,
    n_ops: usize,
) -> Result<AugmentationPlan> {
    draw_plan(table, n_ops, &mut sample_rng(seed, epoch, index))
}

/// Fully augmented, normalized CHW tensor for one training sample.
pub fn augment_sample(
    img: &ImageU8,
    index: usize,
    epoch: usize,
    table: &AsdTable,
    cfg: &TrainConfig,
    norm: &Normalization,
    out: &mut [f64],
) -> Result<()> {
    let mut rng = sample_rng(cfg.seed, epoch, index);
    let plan = draw_plan(table, cfg.ops_per_sample, &mut rng)?;
    let pre = pre_stage(img, &cfg.aux, &mut rng);
    let aug = compose_augment(&pre, plan.steps())?;
    post_stage(&aug, norm, cfg.aux.cutout, &mut rng, out)
}

fn build_batch(
    ds: &Dataset,
    indices: &[usize],
    epoch: usize,
    table: &AsdTable,
    cfg: &TrainConfig,
    norm: &Normalization,
) -> Result<(Batch, Vec<usize>)> {
    let (h, w) = ds
        .shape()
        .ok_or_else(|| Error::Dataset("empty training set".into()))?;
    let mut b = Batch::zeros(indices.len(), CHANNELS, h, w);
    let len = b.sample_len();
    let errors = std::sync::Mutex::new(None);
    par::for_each_chunk_mut(&mut b.data, len, |k, out| {
        let i = indices[k];
        if let Err(e) = augment_sample(&ds.images()[i], i, epoch, table, cfg, norm, out) {
            errors.lock().expect("error slot").get_or_insert(e);
        }
    });
    if let Some(e) = errors.into_inner().expect("error slot") {
        return Err(e);
    }
    let labels = indices.iter().map(|&i| ds.labels()[i]).collect();
    Ok((b, labels))
}

/// Per-batch training losses and per-epoch validation losses of one phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseLosses {
    pub train: Vec<f64>,
    pub val: Vec<f64>,
}

impl PhaseLosses {
    pub fn stats(&self) -> Result<PhaseStats> {
        compute_kappa(&self.train, &self.val)
    }
}

/// Trains epochs `first..first + count` (1-based) with a frozen table.
#[allow(clippy::too_many_arguments)]
pub fn run_phase(
    model: &mut dyn Classifier,
    opt: &mut SgdNesterov,
    train: &Dataset,
    val: &Dataset,
    table: &AsdTable,
    cfg: &TrainConfig,
    norm: &Normalization,
    first_epoch: usize,
    count: usize,
) -> Result<PhaseLosses> {
    let mut losses = PhaseLosses {
        train: Vec::new(),
        val: Vec::with_capacity(count),
    };
    for epoch in first_epoch..first_epoch + count {
        let lr = cosine_lr(epoch, cfg.lr, cfg.epochs);
        let mut order: Vec<usize> = (0..train.len()).collect();
        order.shuffle(&mut counter_rng(cfg.seed, Stream::Shuffle, epoch as u64, 0));
        for (bi, idx) in order.chunks(cfg.batch_size).enumerate() {
            let (x, y) = build_batch(train, idx, epoch, table, cfg, norm)?;
            let loss = sgd_nesterov_step(model, opt, &x, &y, lr).map_err(|e| match e {
                Error::NonFiniteLoss { loss, .. } => Error::NonFiniteLoss {
                    loss,
                    epoch,
                    batch: bi,
                },
                other => other,
            })?;
            losses.train.push(loss);
        }
        losses.val.push(dataset_loss(model, norm, val)?);
        log::debug!(
            "epoch {epoch}: lr {lr:.5}, val loss {:.4}",
            losses.val.last().unwrap()
        );
    }
    Ok(losses)
}

/// One line of the phase log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseLogRecord {
    pub phase_index: usize,
    pub first_epoch: usize,
    pub last_epoch: usize,
    /// Threshold and table in force during the phase.
    pub xi: f64,
    pub gamma_vector: Vec<f64>,
    pub alpha_vector: Vec<f64>,
    pub mean_train_loss: f64,
    pub mean_val_loss: f64,
    #[serde(with = "crate::controller::float_or_inf")]
    pub kappa: f64,
    pub val_accuracy: f64,
    /// Whether the table produced at this boundary is saturated.
    pub saturated: bool,
    pub wall_clock_seconds: f64,
    /// Controller output for the next phase, when it ran.
    pub next_xi: Option<f64>,
    pub next_gamma_vector: Option<Vec<f64>>,
    pub next_alpha_vector: Option<Vec<f64>>,
    /// Measured curves and fits, when they were recomputed.
    pub ror: Option<Vec<OpUpdate>>,
    /// Set when a fit failed or the update was aborted and older values kept.
    pub ror_flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub phases: Vec<PhaseLogRecord>,
    pub val_accuracy: f64,
    pub test_accuracy: f64,
    pub test_tta_accuracy: f64,
    pub tta: TtaMode,
    pub ror_evaluations: usize,
    pub normalization: Normalization,
    pub train_size: usize,
    pub seed: u64,
}

/// Normalization used for training, derived from the training images.
pub fn training_normalization(train: &Dataset, cfg: &TrainConfig) -> Normalization {
    let n = train.channel_stats();
    if cfg.inversion_aware_norm {
        n.inversion_aware()
    } else {
        n
    }
}

/// Runs the whole schedule. `on_phase` sees each record as soon as it is
/// complete, so logs survive an abort later on.
pub fn run_training(
    cfg: &TrainConfig,
    splits: &Splits,
    model: &mut dyn Classifier,
    on_phase: &mut dyn FnMut(&PhaseLogRecord) -> Result<()>,
) -> Result<TrainingSummary> {
    cfg.validate()?;
    let train = if cfg.flip_doubling {
        splits.train.flip_doubled()
    } else {
        splits.train.clone()
    };
    if train.is_empty() || splits.val.is_empty() {
        return Err(Error::Dataset(
            "training and validation sets must be non-empty".into(),
        ));
    }
    let norm = training_normalization(&train, cfg);
    let mut opt = SgdNesterov::new(cfg.momentum, cfg.weight_decay);
    let mut table = cfg.initial_table();
    let mut state = ControllerState::new(cfg.kappa_sp, cfg.xi0)?;
    let mut phases = Vec::with_capacity(cfg.phase_count());
    let mut ror_evaluations = 0;
    let mut saturated = false;

    for j in 1..=cfg.phase_count() {
        let started = Instant::now();
        let first = (j - 1) * cfg.phase_epochs + 1;
        let count = cfg.phase_epochs.min(cfg.epochs + 1 - first);
        let losses = run_phase(
            model,
            &mut opt,
            &train,
            &splits.val,
            &table,
            cfg,
            &norm,
            first,
            count,
        )?;
        let stats = losses.stats()?;
        let val_accuracy = evaluate_accuracy(model, &norm, &splits.val);
        let mut rec = PhaseLogRecord {
            phase_index: j,
            first_epoch: first,
            last_epoch: first + count - 1,
            xi: state.xi,
            gamma_vector: table.gamma_vector(),
            alpha_vector: table.alpha_vector(),
            mean_train_loss: stats.mean_train_loss,
            mean_val_loss: stats.mean_val_loss,
            kappa: stats.kappa,
            val_accuracy,
            saturated,
            wall_clock_seconds: 0.0,
            next_xi: None,
            next_gamma_vector: None,
            next_alpha_vector: None,
            ror: None,
            ror_flagged: false,
        };

        let full_phase = count == cfg.phase_epochs;
        if cfg.mode == AugMode::CtrlA && full_phase {
            state = update_xi(&state, &stats);
            rec.next_xi = Some(state.xi);
            if (j - 1) % cfg.ror_period == 0 {
                let ror_cfg = RorConfig {
                    grid_step: cfg.ror_grid_step,
                    sign_seed: counter_rng(cfg.seed, Stream::RorSign, j as u64, u64::MAX).gen(),
                };
                let view = NormalizedModel {
                    model: &*model,
                    norm,
                };
                ror_evaluations += 1;
                match update_all(&view, &splits.val, state.xi, &table, &ror_cfg) {
                    Ok(up) => {
                        saturated = detect_saturation(&up.table, &up.curves);
                        rec.ror_flagged = up.any_retained();
                        rec.ror = Some(up.ops);
                        table = up.table;
                    }
                    Err(Error::ZeroBaseAccuracy) => {
                        log::warn!(
                            "phase {j}: validation accuracy is zero, keeping the previous table"
                        );
                        rec.ror_flagged = true;
                    }
                    Err(e) => return Err(e),
                }
                rec.saturated = saturated;
            }
            rec.next_gamma_vector = Some(table.gamma_vector());
            rec.next_alpha_vector = Some(table.alpha_vector());
        }
        rec.wall_clock_seconds = started.elapsed().as_secs_f64();
        log::info!(
            "phase {j}: xi {:.3} kappa {:.3} val acc {:.4} ({:.1}s)",
            rec.xi,
            rec.kappa,
            rec.val_accuracy,
            rec.wall_clock_seconds
        );
        on_phase(&rec)?;
        phases.push(rec);
    }

    let view = NormalizedModel {
        model: &*model,
        norm,
    };
    Ok(TrainingSummary {
        phases,
        val_accuracy: accuracy(&view, splits.val.images(), splits.val.labels()),
        test_accuracy: accuracy(&view, splits.test.images(), splits.test.labels()),
        test_tta_accuracy: tta_accuracy(&view, splits.test.images(), splits.test.labels(), cfg.tta),
        tta: cfg.tta,
        ror_evaluations,
        normalization: norm,
        train_size: train.len(),
        seed: cfg.seed,
    })
}
