mod augment;
mod report;
mod ror_curves;
mod sim;
mod train;

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use ctrla_core::config::RunConfig;

#[derive(Parser)]
#[command(
    name = "ctrla",
    version,
    about = "Feedback-controlled data augmentation: training, curves, simulation, reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model under the configured augmentation mode.
    Train(train::TrainArgs),
    /// Measure and fit per-operation response curves for a saved model.
    RorCurves(ror_curves::RorArgs),
    /// Run the controller against a synthetic plant and print the trajectory.
    CtrlSim(sim::SimArgs),
    /// Aggregate metrics from several runs.
    Report(report::ReportArgs),
    /// Apply pool operations to a single PNG image.
    AugmentPng(augment::AugmentArgs),
}

/// Where a run configuration comes from. Flags given later override it.
#[derive(Args, Debug, Clone)]
pub struct ConfigSource {
    /// Built-in setup preset (e.g. modified-cifar10).
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    /// JSON run configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dataset root; overrides the file value. Falls back to CTRLA_DATA_DIR.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Keep only the first N training images.
    #[arg(long)]
    pub train_subset: Option<usize>,
}

impl ConfigSource {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match (&self.preset, &self.config) {
            (Some(name), None) => RunConfig::preset(name)?,
            (None, Some(path)) => {
                RunConfig::load(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?
            }
            _ => bail!("pass exactly one of --preset or --config"),
        };
        if let Some(d) = &self.data_dir {
            cfg.dataset.root = Some(d.clone());
        }
        if let Some(n) = self.train_subset {
            cfg.dataset.train_subset = Some(n);
        }
        Ok(cfg)
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Train(a) => train::run(a),
        Command::RorCurves(a) => ror_curves::run(a),
        Command::CtrlSim(a) => sim::run(a),
        Command::Report(a) => report::run(a),
        Command::AugmentPng(a) => augment::run(a),
    };
    if let Err(e) = outcome {
        let broken_pipe = e.chain().any(|c| {
            let kind = c
                .downcast_ref::<std::io::Error>()
                .map(std::io::Error::kind)
                .or_else(|| {
                    c.downcast_ref::<serde_json::Error>()
                        .and_then(serde_json::Error::io_error_kind)
                });
            kind == Some(std::io::ErrorKind::BrokenPipe)
        });
        if broken_pipe {
            return;
        }
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
