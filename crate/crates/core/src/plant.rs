//! Analytic stand-in for training: per-operation erf response curves and a
//! loss ratio that grows affinely with the mean augmentation strength.
//! Lets the controller and the strength solver run without images.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::asd::AsdTable;
use crate::augpool::{OperationKind, K};
use crate::controller::{detect_saturation, update_xi, ControllerState, PhaseStats};
use crate::error::{Error, Result};
use crate::rng::{counter_rng, Stream};
use crate::ror::{strength_grid, update_from_curves, RorCurve};
use crate::special::erf;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    /// `(A_i, B_i)` for operations `1..=15`.
    pub decays: Vec<(f64, f64)>,
    pub l0: f64,
    pub c: f64,
    pub lv: f64,
    /// Virtual validation-set size for binomial noise on responses; 0 disables noise.
    #[serde(default)]
    pub noise_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for PlantSpec {
    /// Mixed sensitivities; `κ` spans roughly `[1.0, 1.87]`.
    fn default() -> Self {
        let decays = (0..K)
            .map(|i| {
                let a = 0.2 + 0.7 * ((i * 7) % K) as f64 / (K - 1) as f64;
                let b = 0.2 + 0.8 * ((i * 4) % K) as f64 / (K - 1) as f64;
                (a, b)
            })
            .collect();
        Self {
            decays,
            l0: 1.0,
            c: 1.5,
            lv: 1.0,
            noise_samples: 0,
            seed: 0,
        }
    }
}

impl PlantSpec {
    pub fn validate(&self) -> Result<()> {
        if self.decays.len() != K {
            return Err(Error::Config(format!(
                "plant needs {K} decay pairs, got {}",
                self.decays.len()
            )));
        }
        for (i, &(a, b)) in self.decays.iter().enumerate() {
            if !(0.0..=1.0).contains(&a) || !(b > 0.0 && b.is_finite()) {
                return Err(Error::Config(format!(
                    "plant decay {} = ({a}, {b}) needs A in [0, 1] and B > 0",
                    i + 1
                )));
            }
        }
        if !(self.c > 0.0 && self.lv > 0.0 && self.l0 >= 0.0) {
            return Err(Error::Config(
                "plant needs c > 0, lv > 0 and l0 >= 0".into(),
            ));
        }
        Ok(())
    }

    /// Noiseless response.
    pub fn response(&self, op: OperationKind, gamma: f64) -> f64 {
        let (a, b) = self.decays[op.index() - 1];
        1.0 - a * erf(gamma / b)
    }

    /// Largest loss ratio the plant can produce (every `Γ = 1`, `α = R(1)`).
    pub fn kappa_max(&self) -> f64 {
        let m = OperationKind::ALL
            .iter()
            .map(|&op| (1.0 + self.response(op, 1.0).clamp(0.0, 1.0) / 3.0) / 2.0)
            .sum::<f64>()
            / K as f64;
        (self.l0 + self.c * m) / self.lv
    }
}

/// Response at `γ`, with binomial noise when `noise_samples > 0`. `draw`
/// separates repeated measurements.
pub fn plant_ror(spec: &PlantSpec, op: OperationKind, gamma: f64, draw: u64) -> f64 {
    let r = spec.response(op, gamma);
    if gamma == 0.0 || spec.noise_samples == 0 {
        return r;
    }
    let n = spec.noise_samples;
    let p = r.clamp(0.0, 1.0);
    let index = (op.index() as u64) << 8 | (gamma * 100.0).round() as u64;
    let mut rng = counter_rng(spec.seed, Stream::Plant, draw, index);
    (0..n).filter(|_| rng.gen_bool(p)).count() as f64 / n as f64
}

pub fn plant_curves(spec: &PlantSpec, grid_step: f64, draw: u64) -> Result<Vec<RorCurve>> {
    let grid = strength_grid(grid_step);
    OperationKind::ALL
        .iter()
        .map(|&op| {
            let m: Vec<_> = grid
                .iter()
                .map(|&g| (g, plant_ror(spec, op, g, draw)))
                .collect();
            RorCurve::from_measurements(op, &m, 1.0)
        })
        .collect()
}

/// Loss statistics for a phase run with `table`.
pub fn plant_step(spec: &PlantSpec, table: &AsdTable) -> PhaseStats {
    PhaseStats::from_means(spec.l0 + spec.c * table.mean_strength(), spec.lv)
}

/// One row of a closed-loop trajectory: the state in force during `phase`
/// and what was measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub phase: usize,
    pub xi: f64,
    pub kappa: f64,
    pub setpoint: f64,
    pub gamma: Vec<f64>,
    pub alpha: Vec<f64>,
    pub saturated: bool,
}

/// Runs the controller against the plant for `phases` phases, starting from
/// the all-zero table.
pub fn simulate(
    spec: &PlantSpec,
    phases: usize,
    setpoint: f64,
    xi0: f64,
    grid_step: f64,
) -> Result<Vec<SimRecord>> {
    spec.validate()?;
    let mut state = ControllerState::new(setpoint, xi0)?;
    let mut table = AsdTable::zeros();
    let mut saturated = false;
    let mut out = Vec::with_capacity(phases);
    for phase in 1..=phases {
        let stats = plant_step(spec, &table);
        out.push(SimRecord {
            phase,
            xi: state.xi,
            kappa: stats.kappa,
            setpoint,
            gamma: table.gamma_vector(),
            alpha: table.alpha_vector(),
            saturated,
        });
        state = update_xi(&state, &stats);
        let curves = plant_curves(spec, grid_step, phase as u64)?;
        let update = update_from_curves(curves, state.xi, &table)?;
        saturated = detect_saturation(&update.table, &update.curves);
        table = update.table;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asd::AsdParams;

    fn spec_with(a: f64, b: f64) -> PlantSpec {
        PlantSpec {
            decays: vec![(a, b); K],
            ..PlantSpec::default()
        }
    }

    #[test]
    fn response_examples() {
        let s = spec_with(0.5, 0.4);
        assert_eq!(plant_ror(&s, OperationKind::Hue, 0.0, 0), 1.0);
        let r = plant_ror(&s, OperationKind::Hue, 1.0, 0);
        assert!((r - 0.500_203_476).abs() < 1e-8, "{r}");
    }

    #[test]
    fn noise_is_reproducible_and_bounded() {
        let s = PlantSpec {
            noise_samples: 1000,
            seed: 3,
            ..spec_with(0.5, 0.4)
        };
        let a = plant_ror(&s, OperationKind::Scale, 0.5, 1);
        assert_eq!(a, plant_ror(&s, OperationKind::Scale, 0.5, 1));
        let exact = s.response(OperationKind::Scale, 0.5);
        assert!((a - exact).abs() < 5.0 * (exact * (1.0 - exact) / 1000.0).sqrt());
    }

    #[test]
    fn step_examples() {
        let s = PlantSpec::default();
        assert_eq!(plant_step(&s, &AsdTable::zeros()).kappa, s.l0 / s.lv);
        let full = plant_step(&s, &AsdTable::uniform(1.0, 1.0)).kappa;
        assert!((full - (s.l0 + 2.0 * s.c / 3.0) / s.lv).abs() < 1e-12);
        let mut t = AsdTable::uniform(0.3, 0.0);
        let k0 = plant_step(&s, &t).kappa;
        t.set(OperationKind::Contrast, AsdParams::new(0.6, 0.0));
        assert!(plant_step(&s, &t).kappa > k0);
    }

    #[test]
    fn default_plant_is_valid() {
        let s = PlantSpec::default();
        s.validate().unwrap();
        assert!(
            s.kappa_max() > 1.5 && s.kappa_max() < 2.0,
            "{}",
            s.kappa_max()
        );
    }

    #[test]
    fn reachable_setpoint_converges() {
        let traj = simulate(&PlantSpec::default(), 30, 1.5, 0.9, 0.1).unwrap();
        let last = traj.last().unwrap();
        assert!((last.kappa - 1.5).abs() < 0.05, "{last:?}");
    }

    #[test]
    fn unreachable_setpoint_saturates() {
        let traj = simulate(&PlantSpec::default(), 40, 3.0, 0.9, 0.1).unwrap();
        assert!(traj.last().unwrap().saturated);
        assert_eq!(traj.last().unwrap().xi, 0.0);
    }

    #[test]
    fn fixed_point_holds_xi() {
        let s = PlantSpec::default();
        let traj = simulate(&s, 10, s.l0 / s.lv, 1.0, 0.1).unwrap();
        assert!(traj.iter().all(|r| r.xi == 1.0 && r.kappa == s.l0 / s.lv));
    }
}
