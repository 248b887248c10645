//! Feature-space simulation engine for generalized semi-supervised
//! few-shot class-incremental learning.
//!
//! The engine works entirely on embedding vectors: a synthetic benchmark
//! generator produces class-conditional Gaussian features split into a
//! base session, incremental few-shot sessions, unlabeled pools, and test
//! sets; a cosine-prototype classifier learns each session; a dual-branch
//! ambiguity threshold splits each pool into confidently pseudo-labeled
//! and ambiguous samples; and a base-to-novel calibration module blends
//! novel-class Gaussian statistics with similar base classes to generate
//! extra training features. The protocol layer orchestrates sessions
//! under four pool-handling strategies and emits per-session reports.

pub mod alt;
pub mod b2n;
pub mod classifier;
pub mod datagen;
pub mod dataio;
pub mod error;
pub mod protocol;
pub mod seeding;
pub mod types;

mod linalg;

pub use error::{Error, Result};
pub use types::{ExperimentConfig, FeatureVector, LabeledFeature, Strategy};
