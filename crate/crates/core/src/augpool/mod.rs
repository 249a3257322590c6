//! The 15-operation control augmentation pool.
//!
//! Every operation takes a normalized strength `γ ∈ [0, 1]` (signed for the
//! first eleven kinds) and reduces to the identity at `γ = 0`. Composite
//! augmentation is a left fold over a plan of distinct kinds.

mod color;
mod geometric;
mod histogram;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::ImageU8;

pub use histogram::{autocontrast, equalize, posterize_bits, solarize_threshold};

/// Number of operations in the pool.
pub const K: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperationKind {
    TranslateX,
    TranslateY,
    ShearX,
    ShearY,
    Scale,
    Rotation,
    Hue,
    BrightDark,
    SharpenBlur,
    Contrast,
    Saturation,
    Solarize,
    Posterize,
    AutoContrast,
    Equalize,
}

impl OperationKind {
    /// All kinds, ordered by their 1-based index.
    pub const ALL: [OperationKind; K] = [
        Self::TranslateX,
        Self::TranslateY,
        Self::ShearX,
        Self::ShearY,
        Self::Scale,
        Self::Rotation,
        Self::Hue,
        Self::BrightDark,
        Self::SharpenBlur,
        Self::Contrast,
        Self::Saturation,
        Self::Solarize,
        Self::Posterize,
        Self::AutoContrast,
        Self::Equalize,
    ];

    /// Stable 1-based index used in logs and exports.
    pub fn index(self) -> usize {
        self as usize + 1
    }

    pub fn from_index(index: usize) -> Option<Self> {
        index.checked_sub(1).and_then(|i| Self::ALL.get(i).copied())
    }

    /// Signed kinds get their strength negated with probability one half.
    pub fn is_signed(self) -> bool {
        self.index() <= 11
    }

    pub fn is_geometric(self) -> bool {
        self.index() <= 6
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::TranslateX => "TranslateX",
            Self::TranslateY => "TranslateY",
            Self::ShearX => "ShearX",
            Self::ShearY => "ShearY",
            Self::Scale => "Scale",
            Self::Rotation => "Rotation",
            Self::Hue => "Hue",
            Self::BrightDark => "BrightDark",
            Self::SharpenBlur => "SharpenBlur",
            Self::Contrast => "Contrast",
            Self::Saturation => "Saturation",
            Self::Solarize => "Solarize",
            Self::Posterize => "Posterize",
            Self::AutoContrast => "AutoContrast",
            Self::Equalize => "Equalize",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(name))
    }
}

impl std::fmt::Display for OperationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Strength magnitude in `[0, 1]` plus a sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedStrength {
    magnitude: f64,
    negative: bool,
}

impl SignedStrength {
    pub fn new(magnitude: f64, negative: bool) -> Result<Self> {
        if !(0.0..=1.0).contains(&magnitude) {
            return Err(Error::Strength(magnitude));
        }
        Ok(Self {
            magnitude,
            negative,
        })
    }

    pub fn positive(magnitude: f64) -> Result<Self> {
        Self::new(magnitude, false)
    }

    /// Builds a strength for `kind`, dropping the sign on unsigned kinds.
    pub fn for_kind(kind: OperationKind, magnitude: f64, negative: bool) -> Result<Self> {
        Self::new(magnitude, negative && kind.is_signed())
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// `+1.0` or `-1.0`.
    pub fn sign(&self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }

    /// Signed strength `sign × magnitude`.
    pub fn value(&self) -> f64 {
        self.sign() * self.magnitude
    }
}

/// Applies one pool operation.
///
/// The sign of `s` is ignored for unsigned kinds. A zero magnitude returns
/// an exact copy of the input.
pub fn apply_operation(img: &ImageU8, kind: OperationKind, s: SignedStrength) -> ImageU8 {
    if s.magnitude() == 0.0 {
        return img.clone();
    }
    let gamma = if kind.is_signed() {
        s.value()
    } else {
        s.magnitude()
    };
    match kind {
        OperationKind::TranslateX => {
            geometric::translate(img, translate_shift(gamma, img.width()), 0)
        }
        OperationKind::TranslateY => {
            geometric::translate(img, 0, translate_shift(gamma, img.height()))
        }
        OperationKind::ShearX => geometric::shear_x(img, 45f64.to_radians() * gamma),
        OperationKind::ShearY => geometric::shear_y(img, 45f64.to_radians() * gamma),
        OperationKind::Scale => geometric::scale(img, 1.0 + gamma / 2.0),
        OperationKind::Rotation => geometric::rotate(img, 60f64.to_radians() * gamma),
        OperationKind::Hue => color::hue_shift(img, gamma / 2.0),
        OperationKind::BrightDark => color::brightness(img, 1.0 + 0.9 * gamma),
        OperationKind::SharpenBlur => color::sharpness(img, 1.0 + 0.9 * gamma),
        OperationKind::Contrast => color::contrast(img, 1.0 + 0.9 * gamma),
        OperationKind::Saturation => color::saturation(img, 1.0 + 0.9 * gamma),
        OperationKind::Solarize => histogram::solarize(img, solarize_threshold(gamma)),
        OperationKind::Posterize => histogram::posterize(img, posterize_bits(gamma)),
        OperationKind::AutoContrast => blend_apply(img, BlendBase::AutoContrast, gamma),
        OperationKind::Equalize => blend_apply(img, BlendBase::Equalize, gamma),
    }
}

/// Pixel shift of a translation at signed strength `gamma`.
pub fn translate_shift(gamma: f64, extent: usize) -> i64 {
    (gamma / 2.0 * extent as f64).round() as i64
}

/// Applies `plan` in order: the first entry acts on the raw image.
pub fn compose_augment(img: &ImageU8, plan: &[(OperationKind, SignedStrength)]) -> Result<ImageU8> {
    if plan.is_empty() || plan.len() > K {
        return Err(Error::OpsPerSample {
            got: plan.len(),
            max: K,
        });
    }
    let mut seen = [false; K];
    for (kind, _) in plan {
        let slot = &mut seen[kind.index() - 1];
        if *slot {
            return Err(Error::DuplicateOperation(*kind));
        }
        *slot = true;
    }
    Ok(plan.iter().fold(img.clone(), |acc, &(kind, s)| {
        apply_operation(&acc, kind, s)
    }))
}

/// Classical non-parametrized operation used as a blend target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlendBase {
    AutoContrast,
    Equalize,
}

/// Per-pixel `round((1 − γ)·x + γ·O′(x))`.
pub fn blend_apply(img: &ImageU8, base: BlendBase, gamma: f64) -> ImageU8 {
    let gamma = gamma.clamp(0.0, 1.0);
    if gamma == 0.0 {
        return img.clone();
    }
    let target = match base {
        BlendBase::AutoContrast => autocontrast(img),
        BlendBase::Equalize => equalize(img),
    };
    if gamma == 1.0 {
        return target;
    }
    histogram::blend(img, &target, gamma)
}
