//! Feedback-controlled online data augmentation.
//!
//! Training runs in phases. Within a phase every sample is augmented with
//! `N` distinct operations from a fixed pool, each at a strength drawn from
//! a per-operation distribution `U_α(0, Γ)`. Between phases a controller
//! moves an accuracy-retention threshold `ξ` so that the ratio of training
//! to validation loss tracks a setpoint, and the validation-set response of
//! every operation is inverted at `ξ` to produce the next `(Γ, α)` table.

pub mod asd;
pub mod augpool;
pub mod classifier;
pub mod config;
pub mod controller;
pub mod data;
pub mod error;
pub mod evalstats;
pub mod image;
pub mod par;
pub mod plant;
pub mod rng;
pub mod ror;
pub mod special;
pub mod trainer;

pub use asd::{draw_plan, AsdParams, AsdTable, AugmentationPlan};
pub use augpool::{apply_operation, compose_augment, OperationKind, SignedStrength, K};
pub use classifier::{accuracy, ImageClassifier, Logits};
pub use error::{Error, Result};
pub use image::ImageU8;
