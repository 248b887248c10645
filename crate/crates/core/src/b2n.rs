//! Base-to-novel distribution calibration: per-class Gaussian statistics,
//! ambiguity-driven selection of similar base classes, blending of means
//! and covariances with a dispersion constant, and Gaussian feature
//! generation from the calibrated distribution.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::types::FeatureVector;

/// Population mean and covariance of one class (1/N convention).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassStatistics {
    pub class_id: usize,
    pub mean: Vec<f64>,
    pub covariance: DMatrix<f64>,
    pub count: usize,
}

/// A blended Gaussian for one novel class. `cov_prime` is the raw blend
/// plus the dispersion constant; positive-semidefinite repair happens at
/// sampling time.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibratedDistribution {
    pub class_id: usize,
    pub mean_prime: Vec<f64>,
    pub cov_prime: DMatrix<f64>,
    pub alpha: f64,
    pub contributing_base_ids: Vec<usize>,
}

/// Population statistics over the given samples: mean and covariance both
/// divide by N, not N − 1.
pub fn class_statistics(samples: &[FeatureVector], class_id: usize) -> Result<ClassStatistics> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("sample list"));
    }
    let dim = samples[0].dim();
    for s in samples {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: s.dim(),
            });
        }
    }
    let n = samples.len() as f64;
    let mean = linalg::mean_of(samples.iter().map(|s| s.components()), dim);
    let mut covariance = DMatrix::<f64>::zeros(dim, dim);
    for s in samples {
        let c = s.components();
        for i in 0..dim {
            let di = c[i] - mean[i];
            for j in 0..dim {
                covariance[(i, j)] += di * (c[j] - mean[j]);
            }
        }
    }
    covariance /= n;
    Ok(ClassStatistics {
        class_id,
        mean,
        covariance,
        count: samples.len(),
    })
}

/// Ranks base classes for calibrating `novel_class`: first by how often an
/// ambiguous sample paired that base class with this novel class, then by
/// cosine similarity between the novel weight and the base mean, then by
/// class id. Returns the top `k` distinct ids.
pub fn select_base_classes(
    novel_class: usize,
    ambiguous_pairs: &[(usize, usize)],
    base_stats: &BTreeMap<usize, ClassStatistics>,
    novel_weight: &[f64],
    k: usize,
) -> Vec<usize> {
    if k == 0 {
        return Vec::new();
    }
    let mut frequency: BTreeMap<usize, usize> = BTreeMap::new();
    for &(base_arg, novel_arg) in ambiguous_pairs {
        if novel_arg == novel_class && base_stats.contains_key(&base_arg) {
            *frequency.entry(base_arg).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(usize, usize, f64)> = base_stats
        .iter()
        .map(|(&id, stats)| {
            let freq = frequency.get(&id).copied().unwrap_or(0);
            (id, freq, linalg::cosine(novel_weight, &stats.mean))
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then_with(|| b.2.partial_cmp(&a.2).unwrap_or(std::cmp::Ordering::Equal))
            .then_with(|| a.0.cmp(&b.0))
    });
    ranked.into_iter().take(k).map(|(id, _, _)| id).collect()
}

/// Blends the novel statistics with the selected base statistics:
/// mean′ = (Σ μ_b + μ_c)/(k + 1) and cov′ = (Σ Σ_b + Σ_c)/(k + 1) with the
/// dispersion constant added to every covariance entry.
pub fn calibrate(
    novel_stats: &ClassStatistics,
    selected_base_stats: &[&ClassStatistics],
    alpha: f64,
) -> Result<CalibratedDistribution> {
    let dim = novel_stats.mean.len();
    for s in selected_base_stats {
        if s.mean.len() != dim || s.covariance.nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: s.mean.len(),
            });
        }
    }
    let denom = (selected_base_stats.len() + 1) as f64;
    let mut mean_prime = novel_stats.mean.clone();
    for s in selected_base_stats {
        for (m, x) in mean_prime.iter_mut().zip(&s.mean) {
            *m += x;
        }
    }
    for m in &mut mean_prime {
        *m /= denom;
    }
    let mut cov_prime = novel_stats.covariance.clone();
    for s in selected_base_stats {
        cov_prime += &s.covariance;
    }
    cov_prime /= denom;
    cov_prime.iter_mut().for_each(|x| *x += alpha);
    Ok(CalibratedDistribution {
        class_id: novel_stats.class_id,
        mean_prime,
        cov_prime,
        alpha,
        contributing_base_ids: selected_base_stats.iter().map(|s| s.class_id).collect(),
    })
}

/// Draws `n` features from the calibrated Gaussian. The covariance is
/// repaired to positive semidefinite before factorization, so a zero
/// covariance reproduces the mean exactly.
pub fn sample_features<R: Rng>(
    dist: &CalibratedDistribution,
    n: usize,
    rng: &mut R,
) -> Result<Vec<FeatureVector>> {
    let factor = linalg::covariance_factor(&dist.cov_prime)?;
    (0..n)
        .map(|_| FeatureVector::new(linalg::gaussian_draw(&dist.mean_prime, &factor, rng)))
        .collect()
}
