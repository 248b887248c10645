//! Shared domain types: feature vectors, class sets, strategies, and the
//! experiment configuration.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A d-dimensional embedding vector. Components are always finite and
/// the dimension is at least 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    components: Vec<f64>,
}

impl FeatureVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyInput("feature vector"));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteComponent);
        }
        Ok(Self { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn l2_norm(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.components
    }
}

/// A feature vector paired with its class label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFeature {
    pub vector: FeatureVector,
    pub class_id: usize,
}

impl LabeledFeature {
    pub fn new(vector: FeatureVector, class_id: usize) -> Self {
        Self { vector, class_id }
    }
}

/// The ordered set of class ids introduced in one session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSet {
    session_index: usize,
    class_ids: Vec<usize>,
}

impl ClassSet {
    /// Builds a class set; ids are stored sorted and deduplicated.
    pub fn new(session_index: usize, mut class_ids: Vec<usize>) -> Self {
        class_ids.sort_unstable();
        class_ids.dedup();
        Self {
            session_index,
            class_ids,
        }
    }

    pub fn session_index(&self) -> usize {
        self.session_index
    }

    pub fn class_ids(&self) -> &[usize] {
        &self.class_ids
    }

    pub fn contains(&self, class_id: usize) -> bool {
        self.class_ids.binary_search(&class_id).is_ok()
    }

    pub fn len(&self) -> usize {
        self.class_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_ids.is_empty()
    }
}

/// How each incremental session handles the unlabeled pool.
///
/// * `Baseline` — every pool sample is pseudo-labeled by confidence alone.
/// * `Drop` — ambiguous samples are identified and discarded.
/// * `Static` — fixed threshold, ambiguous samples feed calibration.
/// * `Dynamic` — threshold recomputed from each session's score gaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    Baseline,
    Drop,
    Static,
    Dynamic,
}

impl Strategy {
    /// All strategies in report row order.
    pub fn all() -> [Strategy; 4] {
        [
            Strategy::Baseline,
            Strategy::Drop,
            Strategy::Static,
            Strategy::Dynamic,
        ]
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Baseline => "baseline",
            Strategy::Drop => "drop",
            Strategy::Static => "static",
            Strategy::Dynamic => "dynamic",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Strategy::Baseline),
            "drop" => Ok(Strategy::Drop),
            "static" => Ok(Strategy::Static),
            "dynamic" => Ok(Strategy::Dynamic),
            other => Err(Error::InvalidConfig(format!(
                "strategy must be one of baseline|drop|static|dynamic, got {other:?}"
            ))),
        }
    }
}

/// Full description of one experiment: benchmark geometry, session
/// protocol counts, and method hyperparameters.
///
/// Field names double as the keys of the `key=value` config file format.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Embedding dimension d.
    pub dim: usize,
    /// Number of classes in the base session.
    pub base_class_count: usize,
    /// Labeled samples per base class in session 0.
    pub base_samples_per_class: usize,
    /// Novel classes introduced per incremental session (N).
    pub ways: usize,
    /// Labeled shots per novel class (K).
    pub shots: usize,
    /// Number of incremental sessions (T).
    pub session_count: usize,
    /// Unlabeled pool size per incremental session (M).
    pub unlabeled_count: usize,
    /// Fraction of the pool drawn from base classes, in [0, 1].
    pub base_to_novel_ratio: f64,
    /// Threshold smoothing coefficient.
    pub m: f64,
    /// Dispersion constant added to the calibrated covariance.
    pub alpha: f64,
    /// Number of base classes blended into each calibration.
    pub k_base: usize,
    /// Features generated per novel class from the calibrated distribution.
    pub generated_per_class: usize,
    /// Pool-handling strategy.
    pub strategy: Strategy,
    /// Fixed threshold used by the `static` strategy.
    pub static_threshold: f64,
    /// Master seed; every random stream derives from it.
    pub seed: u64,
    /// Test samples per class per session.
    pub test_per_class: usize,
    /// Scale of the base class mean directions.
    pub separation_radius: f64,
    /// Mixing weight pulling each novel class mean toward its parent base
    /// class mean, in [0, 1].
    pub novel_correlation: f64,
    /// Whether ambiguous pool samples enter novel class statistics.
    pub include_ambiguous_in_stats: bool,
    /// Whether pseudo-labeled base samples refresh base weights.
    pub update_base_weights: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dim: 64,
            base_class_count: 20,
            base_samples_per_class: 200,
            ways: 5,
            shots: 5,
            session_count: 4,
            unlabeled_count: 50,
            base_to_novel_ratio: 0.5,
            m: 0.2,
            alpha: 0.2,
            k_base: 1,
            generated_per_class: 10,
            strategy: Strategy::Dynamic,
            static_threshold: 0.4,
            seed: 42,
            test_per_class: 20,
            separation_radius: 5.0,
            novel_correlation: 0.6,
            include_ambiguous_in_stats: false,
            update_base_weights: true,
        }
    }
}

impl ExperimentConfig {
    /// Total number of classes across all sessions.
    pub fn total_class_count(&self) -> usize {
        self.base_class_count + self.ways * self.session_count
    }

    /// Class ids of the base session: `0..base_class_count`.
    pub fn base_class_set(&self) -> ClassSet {
        ClassSet::new(0, (0..self.base_class_count).collect())
    }

    /// Class ids introduced in incremental session `t` (1-based).
    pub fn novel_class_set(&self, session: usize) -> ClassSet {
        let start = self.base_class_count + (session - 1) * self.ways;
        ClassSet::new(session, (start..start + self.ways).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidConfig("dim must be positive".into()));
        }
        if self.base_class_count == 0 {
            return Err(Error::InvalidConfig(
                "base_class_count must be positive".into(),
            ));
        }
        if self.base_samples_per_class == 0 {
            return Err(Error::InvalidConfig(
                "base_samples_per_class must be positive".into(),
            ));
        }
        if self.session_count > 0 && self.ways == 0 {
            return Err(Error::InvalidConfig(
                "ways must be positive when session_count > 0".into(),
            ));
        }
        if self.session_count > 0 && self.shots == 0 {
            return Err(Error::InvalidConfig(
                "shots must be positive when session_count > 0".into(),
            ));
        }
        if !self.base_to_novel_ratio.is_finite()
            || !(0.0..=1.0).contains(&self.base_to_novel_ratio)
        {
            return Err(Error::InvalidConfig(
                "base_to_novel_ratio must lie in [0, 1]".into(),
            ));
        }
        if !self.m.is_finite() || self.m < 0.0 {
            return Err(Error::InvalidConfig("m must be >= 0".into()));
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::InvalidConfig("alpha must be >= 0".into()));
        }
        if !self.static_threshold.is_finite() {
            return Err(Error::InvalidConfig("static_threshold must be finite".into()));
        }
        if self.test_per_class == 0 {
            return Err(Error::InvalidConfig("test_per_class must be positive".into()));
        }
        if !self.separation_radius.is_finite() || self.separation_radius <= 0.0 {
            return Err(Error::InvalidConfig(
                "separation_radius must be positive".into(),
            ));
        }
        if !self.novel_correlation.is_finite()
            || !(0.0..=1.0).contains(&self.novel_correlation)
        {
            return Err(Error::InvalidConfig(
                "novel_correlation must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Checks every config invariant and hands the config back unchanged.
/// The first violated field is reported.
pub fn validate_config(config: ExperimentConfig) -> Result<ExperimentConfig> {
    config.validate()?;
    Ok(config)
}
