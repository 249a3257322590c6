use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use ctrla_core::controller::XI_INIT;
use ctrla_core::plant::{simulate, PlantSpec};

#[derive(Args, Debug)]
pub struct SimArgs {
    /// JSON plant description; the built-in mixed plant when omitted.
    #[arg(long)]
    pub plant: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    pub phases: usize,
    #[arg(long, default_value_t = 1.5)]
    pub setpoint: f64,
    #[arg(long, default_value_t = XI_INIT)]
    pub xi0: f64,
    #[arg(long, default_value_t = 0.1)]
    pub grid_step: f64,
    /// Binomial noise on the synthetic curves, as a virtual sample count.
    #[arg(long)]
    pub noise_samples: Option<usize>,
    /// JSONL destination; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(a: SimArgs) -> Result<()> {
    let mut spec = match &a.plant {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str::<PlantSpec>(&text)
                .with_context(|| format!("parsing {}", p.display()))?
        }
        None => PlantSpec::default(),
    };
    if let Some(n) = a.noise_samples {
        spec.noise_samples = n;
    }
    let traj = simulate(&spec, a.phases, a.setpoint, a.xi0, a.grid_step)?;
    let mut out: Box<dyn Write> = match &a.output {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    for rec in &traj {
        serde_json::to_writer(&mut out, rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    if let Some(last) = traj.last() {
        log::info!(
            "phase {}: xi={:.4} kappa={:.4} (setpoint {}), saturated={}",
            last.phase,
            last.xi,
            last.kappa,
            a.setpoint,
            last.saturated
        );
    }
    Ok(())
}
