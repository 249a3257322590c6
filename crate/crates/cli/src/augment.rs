use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use ctrla_core::asd::{draw_plan, AsdTable};
use ctrla_core::augpool::{compose_augment, OperationKind, SignedStrength};
use ctrla_core::data::{read_png, write_png};
use ctrla_core::rng::{counter_rng, Stream};

#[derive(Args, Debug)]
pub struct AugmentArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Single operation by name (case-insensitive), e.g. Rotation.
    #[arg(long, requires = "strength")]
    pub op: Option<String>,
    /// Strength magnitude in [0, 1] for --op.
    #[arg(long)]
    pub strength: Option<f64>,
    /// Use the negative direction of a signed operation.
    #[arg(long)]
    pub negative: bool,
    /// Without --op: draw this many operations from a uniform table.
    #[arg(long, default_value_t = 2)]
    pub ops: usize,
    #[arg(long, default_value_t = 1.0)]
    pub gamma_max: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(a: AugmentArgs) -> Result<()> {
    let img = read_png(&a.input)?;
    let plan = match (&a.op, a.strength) {
        (Some(name), Some(g)) => {
            let Some(kind) = OperationKind::from_name(name) else {
                let names: Vec<_> = OperationKind::ALL.iter().map(|k| k.name()).collect();
                bail!("unknown operation {name:?}; valid: {}", names.join(", "));
            };
            vec![(kind, SignedStrength::for_kind(kind, g, a.negative)?)]
        }
        (None, _) => {
            let table = AsdTable::uniform(a.gamma_max, a.alpha);
            let mut rng = counter_rng(a.seed, Stream::Augment, 0, 0);
            draw_plan(&table, a.ops, &mut rng)?.steps().to_vec()
        }
        (Some(_), None) => unreachable!("clap enforces --strength with --op"),
    };
    for (k, s) in &plan {
        log::info!("{k} at {:+.3}", s.value());
    }
    let out = compose_augment(&img, &plan)?;
    write_png(&a.output, &out).with_context(|| format!("writing {}", a.output.display()))?;
    Ok(())
}
