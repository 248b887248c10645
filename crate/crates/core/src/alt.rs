//! Ambiguity-guided learnable threshold: scores every unlabeled sample
//! against the base and novel weight blocks separately, derives a
//! threshold from the mean score gap, and partitions the pool into
//! confident (pseudo-labeled) and ambiguous (base↔novel paired) sets.

use crate::classifier::{classify_block, ClassifierWeights};
use crate::error::{Error, Result};
use crate::types::FeatureVector;

/// Dual-branch scores for one unlabeled sample: the best cosine and argmax
/// class within each block.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleScore {
    pub s_base: f64,
    pub base_arg: usize,
    pub s_novel: f64,
    pub novel_arg: usize,
}

impl SampleScore {
    /// Absolute base/novel score gap, in [0, 2].
    pub fn gap(&self) -> f64 {
        (self.s_base - self.s_novel).abs()
    }
}

/// Scores for a whole pool, in pool order.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityScores {
    pub scores: Vec<SampleScore>,
}

impl SimilarityScores {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// A selection threshold and the inputs it was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub tau: f64,
    pub m: f64,
    pub n_scored: usize,
}

/// The pool split: `confident` holds (sample index, pseudo class id);
/// `ambiguous` holds (sample index, base argmax, novel argmax). Together
/// they index every pool sample exactly once.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub confident: Vec<(usize, usize)>,
    pub ambiguous: Vec<(usize, usize, usize)>,
}

/// Scores each feature against the base block and the novel block
/// independently. Requires at least one weight in each block; session 0
/// has no novel block and therefore no threshold selection.
pub fn score_unlabeled(
    features: &[FeatureVector],
    weights: &ClassifierWeights,
) -> Result<SimilarityScores> {
    if weights.base_ids().is_empty() {
        return Err(Error::EmptyInput("base weight block"));
    }
    if !weights.has_novel() {
        return Err(Error::EmptyInput("novel weight block"));
    }
    let scores = features
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let (base_arg, s_base) = classify_block(f, weights.base_block(), i)?;
            let (novel_arg, s_novel) = classify_block(f, weights.novel_block(), i)?;
            Ok(SampleScore {
                s_base,
                base_arg,
                s_novel,
                novel_arg,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimilarityScores { scores })
}

/// τ = mean absolute score gap plus the smoothing coefficient m.
pub fn compute_threshold(scores: &SimilarityScores, m: f64) -> Result<Threshold> {
    if scores.is_empty() {
        return Err(Error::EmptyInput("score list"));
    }
    let sum: f64 = scores.scores.iter().map(|s| s.gap()).sum();
    Ok(Threshold {
        tau: sum / scores.len() as f64 + m,
        m,
        n_scored: scores.len(),
    })
}

/// Splits the pool: a sample is confident iff its gap strictly exceeds τ,
/// and its pseudo label is the argmax of the stronger branch (ties go to
/// base). Everything else is ambiguous and keeps its (base, novel) pair.
pub fn partition(scores: &SimilarityScores, threshold: &Threshold) -> Partition {
    let mut confident = Vec::new();
    let mut ambiguous = Vec::new();
    for (i, s) in scores.scores.iter().enumerate() {
        if s.gap() > threshold.tau {
            let pseudo = if s.s_base >= s.s_novel {
                s.base_arg
            } else {
                s.novel_arg
            };
            confident.push((i, pseudo));
        } else {
            ambiguous.push((i, s.base_arg, s.novel_arg));
        }
    }
    Partition {
        confident,
        ambiguous,
    }
}
