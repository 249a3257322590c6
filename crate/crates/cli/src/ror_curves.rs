use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use ctrla_core::ror::{evaluate_all_curves, fit_erf, RorConfig};
use ctrla_core::trainer::{build_model, load_snapshot, training_normalization, NormalizedModel};

use crate::ConfigSource;

pub const FIT_SUMMARY: &str = "ror_fits.csv";

#[derive(Args, Debug)]
pub struct RorArgs {
    #[command(flatten)]
    pub source: ConfigSource,
    /// Model snapshot written by `train`.
    #[arg(long)]
    pub snapshot: PathBuf,
    /// Directory for the CSV files.
    #[arg(long)]
    pub output: PathBuf,
    /// Seed for the per-sample sign of signed operations.
    #[arg(long, default_value_t = 0)]
    pub sign_seed: u64,
    /// Strength grid step; defaults to the config value.
    #[arg(long)]
    pub grid_step: Option<f64>,
}

pub fn run(a: RorArgs) -> Result<()> {
    let cfg = a.source.resolve()?;
    if !a.snapshot.is_file() {
        anyhow::bail!("snapshot {} not found", a.snapshot.display());
    }
    let splits = cfg.load_splits().context("loading dataset")?;
    let (h, w) = splits.train.shape().context("training set is empty")?;
    let mut model = build_model(
        cfg.train.model,
        splits.train.num_classes(),
        h,
        w,
        cfg.train.seed,
    );
    load_snapshot(model.as_mut(), &a.snapshot)?;
    let norm = training_normalization(&splits.train, &cfg.train);
    let view = NormalizedModel {
        model: model.as_ref(),
        norm,
    };
    let ror_cfg = RorConfig {
        grid_step: a.grid_step.unwrap_or(cfg.train.ror_grid_step),
        sign_seed: a.sign_seed,
    };
    let curves = evaluate_all_curves(&view, &splits.val, &ror_cfg)?;
    fs::create_dir_all(&a.output)?;
    let mut summary = String::from("op_index,op_name,base_accuracy,A,B,rmse,R_at_1\n");
    for curve in &curves {
        let op = curve.op;
        let fit = fit_erf(curve).with_context(|| format!("fitting {op}"))?;
        let mut csv = String::from("op_index,gamma,R,A,B,rmse,R_fit\n");
        for &(g, r) in &curve.points {
            csv.push_str(&format!(
                "{},{g},{r},{},{},{},{}\n",
                op.index(),
                fit.amplitude,
                fit.scale,
                fit.rmse,
                fit.predict(g)
            ));
        }
        let path = a
            .output
            .join(format!("ror_{:02}_{}.csv", op.index(), op.name()));
        fs::write(&path, csv)?;
        summary.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            op.index(),
            op.name(),
            curve.base_accuracy,
            fit.amplitude,
            fit.scale,
            fit.rmse,
            curve.response_at_one()
        ));
        log::info!(
            "{op:>12}: A={:.3} B={:.3} rmse={:.4}",
            fit.amplitude,
            fit.scale,
            fit.rmse
        );
    }
    fs::write(a.output.join(FIT_SUMMARY), summary)?;
    log::info!(
        "base accuracy {:.4}; {} curves written to {}",
        curves[0].base_accuracy,
        curves.len(),
        a.output.display()
    );
    Ok(())
}
