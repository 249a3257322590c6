//! Relative operation response curves and the strength update they drive.
//!
//! For each operation the validation set is augmented at strengths
//! `Δγ, 2Δγ, …, 1` and accuracy is divided by the unaugmented accuracy.
//! A decay model `R̂(γ) = 1 − A·erf(γ/B)` is fitted by least squares and
//! inverted at the threshold `ξ` to obtain the next `Γ`; `α` follows from the
//! measured response at full strength.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::asd::{AsdParams, AsdTable};
use crate::augpool::{apply_operation, OperationKind, SignedStrength, K};
use crate::classifier::{accuracy, ImageClassifier};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::par;
use crate::rng::{counter_rng, Stream};
use crate::special::{erf, erfinv};

/// Search interval for the fitted scale.
pub const B_MIN: f64 = 1e-3;
pub const B_MAX: f64 = 10.0;
pub const A_MAX: f64 = 2.0;
/// Fits with larger residual are treated as unreliable.
pub const RMSE_LIMIT: f64 = 0.15;

/// Measured response of one operation; `points[0]` is always `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RorCurve {
    pub op: OperationKind,
    pub points: Vec<(f64, f64)>,
    pub base_accuracy: f64,
}

impl RorCurve {
    /// Builds a curve from measured `(γ, R)` pairs with `γ > 0`, prepending
    /// the identity point.
    pub fn from_measurements(
        op: OperationKind,
        measured: &[(f64, f64)],
        base_accuracy: f64,
    ) -> Result<Self> {
        let mut points = Vec::with_capacity(measured.len() + 1);
        points.push((0.0, 1.0));
        points.extend_from_slice(measured);
        let curve = Self {
            op,
            points,
            base_accuracy,
        };
        curve.validate()?;
        Ok(curve)
    }

    fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Error::InvalidCurve {
            op_index: self.op.index(),
            reason: reason.to_string(),
        };
        if self.points.first() != Some(&(0.0, 1.0)) {
            return Err(bad("first point must be (0, 1)"));
        }
        if self.points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(bad("strength grid must be strictly increasing"));
        }
        if self.points.last().map(|p| p.0) != Some(1.0) {
            return Err(bad("strength grid must end at 1"));
        }
        if self.points.iter().any(|p| !p.1.is_finite() || p.1 < 0.0) {
            return Err(bad("responses must be finite and non-negative"));
        }
        Ok(())
    }

    /// Measured response at full strength.
    pub fn response_at_one(&self) -> f64 {
        self.points.last().map(|p| p.1).unwrap_or(1.0)
    }
}

/// `γ = Δγ, 2Δγ, …, 1` (the last value pinned to exactly 1).
pub fn strength_grid(step: f64) -> Vec<f64> {
    let n = (1.0 / step).round().max(1.0) as usize;
    (1..=n)
        .map(|k| if k == n { 1.0 } else { k as f64 / n as f64 })
        .collect()
}

/// Knobs for response measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RorConfig {
    pub grid_step: f64,
    /// Seeds the per-sample sign of signed operations; fixed per phase.
    pub sign_seed: u64,
}

impl Default for RorConfig {
    fn default() -> Self {
        Self {
            grid_step: 0.1,
            sign_seed: 0,
        }
    }
}

fn sample_sign_negative(seed: u64, op: OperationKind, index: usize) -> bool {
    counter_rng(seed, Stream::RorSign, op.index() as u64, index as u64).gen_bool(0.5)
}

fn augmented_accuracy(
    model: &dyn ImageClassifier,
    val: &Dataset,
    op: OperationKind,
    gamma: f64,
    sign_seed: u64,
) -> f64 {
    let images: Vec<_> = val
        .images()
        .iter()
        .enumerate()
        .map(|(k, img)| {
            let neg = op.is_signed() && sample_sign_negative(sign_seed, op, k);
            let s = SignedStrength::new(gamma, neg).expect("grid strength in [0, 1]");
            apply_operation(img, op, s)
        })
        .collect();
    accuracy(model, &images, val.labels())
}

fn base_accuracy(model: &dyn ImageClassifier, val: &Dataset) -> Result<f64> {
    if val.is_empty() {
        return Err(Error::Dataset("validation set is empty".into()));
    }
    let acc = accuracy(model, val.images(), val.labels());
    if acc == 0.0 {
        return Err(Error::ZeroBaseAccuracy);
    }
    Ok(acc)
}

/// Measures one operation's response curve on `val`.
pub fn evaluate_ror_curve(
    model: &dyn ImageClassifier,
    val: &Dataset,
    op: OperationKind,
    config: &RorConfig,
) -> Result<RorCurve> {
    let base = base_accuracy(model, val)?;
    let grid = strength_grid(config.grid_step);
    let accs = par::map_slice(&grid, |&g| {
        augmented_accuracy(model, val, op, g, config.sign_seed)
    });
    let measured: Vec<_> = grid.iter().zip(accs).map(|(&g, a)| (g, a / base)).collect();
    RorCurve::from_measurements(op, &measured, base)
}

/// Measures all fifteen curves, fanning (operation, strength) pairs out.
pub fn evaluate_all_curves(
    model: &dyn ImageClassifier,
    val: &Dataset,
    config: &RorConfig,
) -> Result<Vec<RorCurve>> {
    let base = base_accuracy(model, val)?;
    let grid = strength_grid(config.grid_step);
    let tasks: Vec<(OperationKind, f64)> = OperationKind::ALL
        .iter()
        .flat_map(|&op| grid.iter().map(move |&g| (op, g)))
        .collect();
    let accs = par::map_slice(&tasks, |&(op, g)| {
        augmented_accuracy(model, val, op, g, config.sign_seed)
    });
    OperationKind::ALL
        .iter()
        .enumerate()
        .map(|(i, &op)| {
            let measured: Vec<_> = grid
                .iter()
                .zip(&accs[i * grid.len()..(i + 1) * grid.len()])
                .map(|(&g, &a)| (g, a / base))
                .collect();
            RorCurve::from_measurements(op, &measured, base)
        })
        .collect()
}

/// Fitted `R̂(γ) = 1 − A·erf(γ/B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErfFit {
    pub amplitude: f64,
    pub scale: f64,
    pub rmse: f64,
}

impl ErfFit {
    pub fn predict(&self, gamma: f64) -> f64 {
        1.0 - self.amplitude * erf(gamma / self.scale)
    }
}

/// Best amplitude for a fixed scale (clamped least squares) and its SSE.
fn profile(points: &[(f64, f64)], scale: f64) -> (f64, f64) {
    let (mut num, mut den) = (0.0, 0.0);
    for &(g, r) in points {
        let e = erf(g / scale);
        num += (1.0 - r) * e;
        den += e * e;
    }
    let a = if den > 0.0 {
        (num / den).clamp(0.0, A_MAX)
    } else {
        0.0
    };
    let sse = points
        .iter()
        .map(|&(g, r)| {
            let d = r - (1.0 - a * erf(g / scale));
            d * d
        })
        .sum();
    (a, sse)
}

/// Least-squares fit of the erf decay model: golden-section search over
/// `log B` (bracketed by a coarse scan) with the amplitude solved in
/// closed form at each `B`.
pub fn fit_erf(curve: &RorCurve) -> Result<ErfFit> {
    let pts: Vec<(f64, f64)> = curve.points.iter().copied().filter(|p| p.0 > 0.0).collect();
    if pts.len() < 3 {
        return Err(Error::InvalidCurve {
            op_index: curve.op.index(),
            reason: format!("need at least 3 points beyond zero, got {}", pts.len()),
        });
    }
    if pts.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::InvalidCurve {
            op_index: curve.op.index(),
            reason: "non-finite response".into(),
        });
    }
    let sse_at = |log_b: f64| profile(&pts, log_b.exp()).1;

    let (lo, hi) = (B_MIN.ln(), B_MAX.ln());
    const SCAN: usize = 64;
    let step = (hi - lo) / SCAN as f64;
    let best = (0..=SCAN)
        .map(|i| (i, sse_at(lo + i as f64 * step)))
        .fold(
            (0, f64::INFINITY),
            |acc, (i, s)| if s < acc.1 { (i, s) } else { acc },
        )
        .0;
    let mut a = lo + best.saturating_sub(1) as f64 * step;
    let mut b = lo + (best + 1).min(SCAN) as f64 * step;

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (sse_at(c), sse_at(d));
    while b - a > 1e-10 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sse_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sse_at(d);
        }
    }
    let scale = (0.5 * (a + b)).exp();
    let (amplitude, sse) = profile(&pts, scale);
    let rmse = (sse / pts.len() as f64).sqrt();
    if amplitude == 0.0 {
        // flat or rising curve: the scale is unidentifiable
        let (_, sse) = profile(&pts, B_MAX);
        return Ok(ErfFit {
            amplitude: 0.0,
            scale: B_MAX,
            rmse: (sse / pts.len() as f64).sqrt(),
        });
    }
    Ok(ErfFit {
        amplitude,
        scale,
        rmse,
    })
}

/// Next upper bound `Γ`: the strength at which the fitted response falls to
/// `ξ`, or 1 when it never does on `[0, 1]`.
pub fn solve_gamma(fit: &ErfFit, xi: f64) -> f64 {
    if fit.amplitude <= 0.0 || fit.predict(1.0) > xi {
        return 1.0;
    }
    let y = ((1.0 - xi) / fit.amplitude).clamp(0.0, 1.0);
    (fit.scale * erfinv(y)).clamp(0.0, 1.0)
}

/// Next skew `α`: zero unless `Γ = 1`, then the measured full-strength
/// response rescaled so that `R(1) = ξ ↦ 0` and `R(1) = 1 ↦ 1`.
pub fn compute_alpha(curve: &RorCurve, xi: f64, gamma_max: f64) -> f64 {
    if gamma_max < 1.0 {
        return 0.0;
    }
    let r1 = curve.response_at_one();
    if xi >= 1.0 {
        return if r1 >= 1.0 { 1.0 } else { 0.0 };
    }
    ((r1 - xi) / (1.0 - xi)).clamp(0.0, 1.0)
}

/// Per-operation outcome of a strength update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpUpdate {
    pub op_index: usize,
    pub gammas: Vec<f64>,
    pub responses: Vec<f64>,
    pub fit: Option<ErfFit>,
    pub gamma_max: f64,
    pub skew: f64,
    /// Fit failed or was unreliable; the previous parameters were kept.
    pub retained: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableUpdate {
    pub table: AsdTable,
    pub curves: Vec<RorCurve>,
    pub ops: Vec<OpUpdate>,
}

impl TableUpdate {
    pub fn any_retained(&self) -> bool {
        self.ops.iter().any(|o| o.retained)
    }
}

/// Solves `(Γ, α)` for every operation from already-measured curves.
pub fn update_from_curves(
    curves: Vec<RorCurve>,
    xi: f64,
    previous: &AsdTable,
) -> Result<TableUpdate> {
    if curves.len() != K {
        return Err(Error::Config(format!(
            "expected {K} curves, got {}",
            curves.len()
        )));
    }
    let mut table = *previous;
    let mut ops = Vec::with_capacity(K);
    for curve in &curves {
        let fit = fit_erf(curve).ok().filter(|f| f.rmse <= RMSE_LIMIT);
        let (gamma_max, skew, retained) = match fit {
            Some(f) => {
                let g = solve_gamma(&f, xi);
                (g, compute_alpha(curve, xi, g), false)
            }
            None => {
                let prev = previous.get(curve.op);
                log::warn!(
                    "op {} ({}): unreliable response fit, keeping previous strengths",
                    curve.op.index(),
                    curve.op
                );
                (prev.gamma_max(), prev.skew(), true)
            }
        };
        table.set(curve.op, AsdParams::new(gamma_max, skew));
        ops.push(OpUpdate {
            op_index: curve.op.index(),
            gammas: curve.points.iter().map(|p| p.0).collect(),
            responses: curve.points.iter().map(|p| p.1).collect(),
            fit: fit.or_else(|| fit_erf(curve).ok()),
            gamma_max,
            skew,
            retained,
        });
    }
    Ok(TableUpdate { table, curves, ops })
}

/// Measures every curve on `val` and solves the next strength table.
pub fn update_all(
    model: &dyn ImageClassifier,
    val: &Dataset,
    xi: f64,
    previous: &AsdTable,
    config: &RorConfig,
) -> Result<TableUpdate> {
    let curves = evaluate_all_curves(model, val, config)?;
    update_from_curves(curves, xi, previous)
}
