//! Setpoint tracking of the train/validation loss ratio `κ` through the
//! accuracy-retention threshold `ξ`.

use serde::{Deserialize, Serialize};

use crate::asd::AsdTable;
use crate::error::{Error, Result};
use crate::ror::RorCurve;

pub const XI_INIT: f64 = 0.9;
pub const STEP_MIN: f64 = 0.005;
pub const STEP_MAX: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerState {
    pub xi: f64,
    pub setpoint: f64,
    pub step_min: f64,
    pub step_max: f64,
    pub phase_index: usize,
}

impl ControllerState {
    pub fn new(setpoint: f64, xi: f64) -> Result<Self> {
        if !(setpoint.is_finite() && setpoint >= 0.0) {
            return Err(Error::Config(format!(
                "setpoint must be finite and >= 0, got {setpoint}"
            )));
        }
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::Config(format!("xi must lie in [0, 1], got {xi}")));
        }
        Ok(Self {
            xi,
            setpoint,
            step_min: STEP_MIN,
            step_max: STEP_MAX,
            phase_index: 1,
        })
    }

    pub fn with_step_bounds(mut self, step_min: f64, step_max: f64) -> Result<Self> {
        if !(step_min > 0.0 && step_min <= step_max && step_max.is_finite()) {
            return Err(Error::Config(format!(
                "step bounds need 0 < min <= max, got [{step_min}, {step_max}]"
            )));
        }
        self.step_min = step_min;
        self.step_max = step_max;
        Ok(self)
    }

    /// `K_g = (1 − ξ)/2`.
    pub fn gain(&self) -> f64 {
        (1.0 - self.xi) / 2.0
    }

    /// Clamped step for a given loss ratio.
    pub fn step(&self, kappa: f64) -> f64 {
        if kappa == f64::INFINITY {
            return self.step_max;
        }
        let error = kappa - self.setpoint;
        if error == 0.0 || error.is_nan() {
            return 0.0;
        }
        // sign from the error so a vanishing gain (ξ = 1) still moves
        let raw = self.gain() * error;
        error.signum() * raw.abs().clamp(self.step_min, self.step_max)
    }
}

/// Phase-averaged losses and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub mean_train_loss: f64,
    pub mean_val_loss: f64,
    /// `+∞` when the validation loss vanishes.
    #[serde(with = "float_or_inf")]
    pub kappa: f64,
}

impl PhaseStats {
    pub fn from_means(mean_train_loss: f64, mean_val_loss: f64) -> Self {
        let kappa = if mean_val_loss > 0.0 {
            mean_train_loss / mean_val_loss
        } else {
            log::warn!("phase validation loss is zero; treating the loss ratio as infinite");
            f64::INFINITY
        };
        Self {
            mean_train_loss,
            mean_val_loss,
            kappa,
        }
    }
}

/// JSON has no infinity; store it as the string `"inf"`.
pub(crate) mod float_or_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str("inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("unexpected value {s:?}"))),
        }
    }
}

fn mean_of(xs: &[f64], what: &str) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::InvalidStats(format!("{what} losses are empty")));
    }
    if let Some(v) = xs.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidStats(format!(
            "{what} loss {v} is not a finite non-negative value"
        )));
    }
    Ok(xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Per-batch training losses and per-epoch validation losses of one phase.
pub fn compute_kappa(train_losses: &[f64], val_losses: &[f64]) -> Result<PhaseStats> {
    Ok(PhaseStats::from_means(
        mean_of(train_losses, "training")?,
        mean_of(val_losses, "validation")?,
    ))
}

/// One controller step: `ξ ← clamp(ξ + Δξ, 0, 1)`.
pub fn update_xi(state: &ControllerState, stats: &PhaseStats) -> ControllerState {
    let mut next = *state;
    next.xi = (state.xi + state.step(stats.kappa)).clamp(0.0, 1.0);
    next.phase_index += 1;
    next
}

/// Absolute slack when comparing a skew against its ceiling.
pub const SATURATION_TOL: f64 = 1e-9;

/// Every operation at full range with the largest skew any threshold could
/// give it: the controller has no authority left to strengthen augmentation.
pub fn detect_saturation(table: &AsdTable, curves: &[RorCurve]) -> bool {
    if curves.is_empty() {
        return false;
    }
    curves.iter().all(|c| {
        let p = table.get(c.op);
        let ceiling = c.response_at_one().clamp(0.0, 1.0);
        p.gamma_max() == 1.0 && p.skew() >= ceiling - SATURATION_TOL
    })
}
