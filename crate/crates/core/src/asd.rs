//! Augmentation strength distributions `U_α(0, Γ)`.
//!
//! The family is a linear tilt of the uniform distribution on `[0, Γ]`:
//!
//! ```text
//! f(γ) = (1/Γ)·[(1 − α) + 2αγ/Γ],   γ ∈ [0, Γ]
//! ```
//!
//! uniform at `α = 0`, triangular with mode `Γ` at `α = 1`, with mean
//! `(1 + α/3)·Γ/2`. Sampling uses the exact two-component mixture.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::augpool::{OperationKind, SignedStrength, K};
use crate::error::{Error, Result};

/// Upper bound `Γ` and skew `α`, both held in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AsdParams {
    gamma_max: f64,
    skew: f64,
}

impl AsdParams {
    /// Out-of-range (and NaN) inputs are clamped into `[0, 1]`.
    pub fn new(gamma_max: f64, skew: f64) -> Self {
        let clamp = |v: f64| if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        Self {
            gamma_max: clamp(gamma_max),
            skew: clamp(skew),
        }
    }

    pub fn gamma_max(&self) -> f64 {
        self.gamma_max
    }

    pub fn skew(&self) -> f64 {
        self.skew
    }

    pub fn mean(&self) -> f64 {
        (1.0 + self.skew / 3.0) * self.gamma_max / 2.0
    }

    pub fn density(&self, gamma: f64) -> Result<f64> {
        let g = self.gamma_max;
        if g == 0.0 {
            return Err(Error::DegenerateDistribution);
        }
        if !(0.0..=g).contains(&gamma) {
            return Ok(0.0);
        }
        Ok(((1.0 - self.skew) + 2.0 * self.skew * gamma / g) / g)
    }

    /// `F(γ) = (1 − α)·γ/Γ + α·(γ/Γ)²` on the support.
    pub fn cdf(&self, gamma: f64) -> f64 {
        let g = self.gamma_max;
        if g == 0.0 {
            return if gamma >= 0.0 { 1.0 } else { 0.0 };
        }
        let t = (gamma / g).clamp(0.0, 1.0);
        (1.0 - self.skew) * t + self.skew * t * t
    }

    /// Exact draw: uniform with probability `1 − α`, else `Γ·√u`.
    /// Always consumes two uniforms.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let pick: f64 = rng.gen();
        let u: f64 = rng.gen();
        let t = if pick < self.skew { u.sqrt() } else { u };
        (self.gamma_max * t).min(self.gamma_max)
    }
}

/// Free-function form of [`AsdParams::density`].
pub fn asd_density(p: AsdParams, gamma: f64) -> Result<f64> {
    p.density(gamma)
}

/// Free-function form of [`AsdParams::sample`].
pub fn asd_sample<R: Rng + ?Sized>(p: AsdParams, rng: &mut R) -> f64 {
    p.sample(rng)
}

/// One [`AsdParams`] per pool operation, indexed by `index() − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AsdTable {
    entries: [AsdParams; K],
}

impl AsdTable {
    pub fn new(entries: [AsdParams; K]) -> Self {
        Self { entries }
    }

    /// Every entry `(Γ, α) = (0, 0)`: augmentation switched off.
    pub fn zeros() -> Self {
        Self::default()
    }

    pub fn uniform(gamma_max: f64, skew: f64) -> Self {
        Self::new([AsdParams::new(gamma_max, skew); K])
    }

    /// Builds from the two length-15 vectors written to phase logs.
    pub fn from_vectors(gamma: &[f64], alpha: &[f64]) -> Result<Self> {
        if gamma.len() != K || alpha.len() != K {
            return Err(Error::Config(format!(
                "strength table needs {K} gamma and alpha values, got {} and {}",
                gamma.len(),
                alpha.len()
            )));
        }
        let mut entries = [AsdParams::default(); K];
        for (i, e) in entries.iter_mut().enumerate() {
            *e = AsdParams::new(gamma[i], alpha[i]);
        }
        Ok(Self { entries })
    }

    pub fn get(&self, kind: OperationKind) -> AsdParams {
        self.entries[kind.index() - 1]
    }

    pub fn set(&mut self, kind: OperationKind, params: AsdParams) {
        self.entries[kind.index() - 1] = params;
    }

    pub fn entries(&self) -> &[AsdParams; K] {
        &self.entries
    }

    pub fn gamma_vector(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.gamma_max).collect()
    }

    pub fn alpha_vector(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.skew).collect()
    }

    /// Mean strength across operations.
    pub fn mean_strength(&self) -> f64 {
        self.entries.iter().map(AsdParams::mean).sum::<f64>() / K as f64
    }
}

/// Operations drawn for one training sample, in application order.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentationPlan {
    steps: Vec<(OperationKind, SignedStrength)>,
}

impl AugmentationPlan {
    pub fn steps(&self) -> &[(OperationKind, SignedStrength)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Draws `n` distinct operations uniformly (partial Fisher–Yates, draw
/// order kept), a strength for each from its distribution, and a fair sign
/// flip for signed kinds.
pub fn draw_plan<R: Rng + ?Sized>(
    table: &AsdTable,
    n: usize,
    rng: &mut R,
) -> Result<AugmentationPlan> {
    if n == 0 || n > K {
        return Err(Error::OpsPerSample { got: n, max: K });
    }
    let mut pool = OperationKind::ALL;
    let mut steps = Vec::with_capacity(n);
    for i in 0..n {
        let j = rng.gen_range(i..K);
        pool.swap(i, j);
        let kind = pool[i];
        let magnitude = table.get(kind).sample(rng);
        let flip: bool = rng.gen_bool(0.5);
        steps.push((kind, SignedStrength::for_kind(kind, magnitude, flip)?));
    }
    Ok(AugmentationPlan { steps })
}
