//! Synthetic benchmark construction: class-conditional Gaussian feature
//! generators with controllable base↔novel correlation, split into a base
//! session, incremental labeled shots, unlabeled pools, and test sets.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::seeding;
use crate::types::{ExperimentConfig, FeatureVector, LabeledFeature};

/// Ground-truth Gaussian for one class. For novel classes the mean is the
/// recorded mix `(1 − λ)·fresh_direction + λ·parent_mean`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassGenerator {
    pub class_id: usize,
    pub true_mean: Vec<f64>,
    pub true_covariance: DMatrix<f64>,
    pub parent_base_id: Option<usize>,
    pub mixing: f64,
    pub fresh_direction: Vec<f64>,
}

/// One pool entry. The hidden class travels with the sample for
/// diagnostics only; scoring and classification never see it.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolSample {
    pub feature: FeatureVector,
    pub hidden_class: usize,
}

/// All data visible in one session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionData {
    pub session_index: usize,
    pub labeled: Vec<LabeledFeature>,
    pub unlabeled: Vec<PoolSample>,
    pub test: Vec<LabeledFeature>,
}

/// Convex mix of a fresh direction and a parent mean.
pub fn mix_mean(fresh: &[f64], parent: &[f64], lambda: f64) -> Vec<f64> {
    fresh
        .iter()
        .zip(parent)
        .map(|(f, p)| (1.0 - lambda) * f + lambda * p)
        .collect()
}

fn random_scaled_direction(dim: usize, radius: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = linalg::norm(&v);
        if n > 1e-9 {
            return v.into_iter().map(|x| radius * x / n).collect();
        }
    }
}

/// Lays out the class universe: well-separated base means plus novel means
/// correlated with a round-robin-assigned parent base class.
pub fn make_class_generators(config: &ExperimentConfig) -> Result<Vec<ClassGenerator>> {
    config.validate()?;
    let mut rng = seeding::layout_rng(config.seed);
    let d = config.dim;
    let identity = DMatrix::<f64>::identity(d, d);
    let mut generators = Vec::with_capacity(config.total_class_count());

    for class_id in 0..config.base_class_count {
        let mean = random_scaled_direction(d, config.separation_radius, &mut rng);
        generators.push(ClassGenerator {
            class_id,
            true_mean: mean.clone(),
            true_covariance: identity.clone(),
            parent_base_id: None,
            mixing: 0.0,
            fresh_direction: mean,
        });
    }

    let novel_total = config.ways * config.session_count;
    for k in 0..novel_total {
        let class_id = config.base_class_count + k;
        let parent = k % config.base_class_count;
        let fresh = random_scaled_direction(d, config.separation_radius, &mut rng);
        let mean = mix_mean(&fresh, &generators[parent].true_mean, config.novel_correlation);
        generators.push(ClassGenerator {
            class_id,
            true_mean: mean,
            true_covariance: identity.clone(),
            parent_base_id: Some(parent),
            mixing: config.novel_correlation,
            fresh_direction: fresh,
        });
    }
    Ok(generators)
}

/// Smallest distance between any two true means; a separation diagnostic.
pub fn min_pairwise_mean_distance(generators: &[ClassGenerator]) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..generators.len() {
        for j in (i + 1)..generators.len() {
            let dist: f64 = generators[i]
                .true_mean
                .iter()
                .zip(&generators[j].true_mean)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            min = min.min(dist);
        }
    }
    min
}

struct ClassSampler {
    mean: Vec<f64>,
    factor: DMatrix<f64>,
}

impl ClassSampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> Result<FeatureVector> {
        FeatureVector::new(linalg::gaussian_draw(&self.mean, &self.factor, rng))
    }
}

/// Builds the session splits from an explicit generator list. Errors when
/// the generators do not cover every class id the config's sessions need.
pub fn generate_sessions(
    generators: &[ClassGenerator],
    config: &ExperimentConfig,
) -> Result<Vec<SessionData>> {
    config.validate()?;
    let needed = config.total_class_count();
    if generators.len() < needed {
        return Err(Error::ClassBudget {
            needed,
            available: generators.len(),
        });
    }
    for (idx, g) in generators.iter().enumerate().take(needed) {
        if g.class_id != idx {
            return Err(Error::InvalidConfig(format!(
                "generator at position {idx} has class_id {}, expected dense ids",
                g.class_id
            )));
        }
        if g.true_mean.len() != config.dim {
            return Err(Error::DimensionMismatch {
                expected: config.dim,
                actual: g.true_mean.len(),
            });
        }
    }

    let samplers: Vec<ClassSampler> = generators
        .iter()
        .take(needed)
        .map(|g| {
            Ok(ClassSampler {
                mean: g.true_mean.clone(),
                factor: linalg::covariance_factor(&g.true_covariance)?,
            })
        })
        .collect::<Result<_>>()?;

    let mut rng = seeding::session_rng(config.seed);
    let mut sessions = Vec::with_capacity(config.session_count + 1);

    // Session 0: abundant base data, no pool.
    let mut labeled = Vec::with_capacity(config.base_class_count * config.base_samples_per_class);
    for class_id in 0..config.base_class_count {
        for _ in 0..config.base_samples_per_class {
            labeled.push(LabeledFeature::new(samplers[class_id].draw(&mut rng)?, class_id));
        }
    }
    let test = draw_test_set(&samplers, config.base_class_count, config.test_per_class, &mut rng)?;
    sessions.push(SessionData {
        session_index: 0,
        labeled,
        unlabeled: Vec::new(),
        test,
    });

    for t in 1..=config.session_count {
        let new_classes = config.novel_class_set(t);
        let mut labeled = Vec::with_capacity(config.ways * config.shots);
        for &class_id in new_classes.class_ids() {
            for _ in 0..config.shots {
                labeled.push(LabeledFeature::new(samplers[class_id].draw(&mut rng)?, class_id));
            }
        }

        let pool_size = config.unlabeled_count;
        let base_share = ((config.base_to_novel_ratio * pool_size as f64).ceil() as usize)
            .min(pool_size);
        let novel_seen = config.base_class_count + t * config.ways;
        let mut unlabeled = Vec::with_capacity(pool_size);
        for _ in 0..base_share {
            let hidden = rng.random_range(0..config.base_class_count);
            unlabeled.push(PoolSample {
                feature: samplers[hidden].draw(&mut rng)?,
                hidden_class: hidden,
            });
        }
        for _ in base_share..pool_size {
            // Uniform over every novel class seen so far, not just this
            // session's: the pool mixes old and new novel classes.
            let hidden = rng.random_range(config.base_class_count..novel_seen);
            unlabeled.push(PoolSample {
                feature: samplers[hidden].draw(&mut rng)?,
                hidden_class: hidden,
            });
        }
        unlabeled.shuffle(&mut rng);

        let test = draw_test_set(&samplers, novel_seen, config.test_per_class, &mut rng)?;
        sessions.push(SessionData {
            session_index: t,
            labeled,
            unlabeled,
            test,
        });
    }
    Ok(sessions)
}

fn draw_test_set(
    samplers: &[ClassSampler],
    class_count: usize,
    per_class: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<LabeledFeature>> {
    let mut test = Vec::with_capacity(class_count * per_class);
    for class_id in 0..class_count {
        for _ in 0..per_class {
            test.push(LabeledFeature::new(samplers[class_id].draw(rng)?, class_id));
        }
    }
    Ok(test)
}

/// Generates the full benchmark for a config: `T + 1` sessions, bit-identical
/// across runs for a fixed seed.
pub fn generate_benchmark(config: &ExperimentConfig) -> Result<Vec<SessionData>> {
    let generators = make_class_generators(config)?;
    generate_sessions(&generators, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            dim: 4,
            base_class_count: 6,
            base_samples_per_class: 40,
            ways: 2,
            shots: 3,
            session_count: 3,
            unlabeled_count: 10,
            test_per_class: 4,
            seed: 5,
            ..Default::default()
        }
    }

    #[test]
    fn mix_mean_matches_recorded_formula() {
        let novel = mix_mean(&[0.0, 2.0], &[2.0, 0.0], 0.5);
        assert_eq!(novel, vec![1.0, 1.0]);
    }

    #[test]
    fn lambda_boundaries() {
        let fresh = [0.0, 2.0];
        let parent = [2.0, 0.0];
        assert_eq!(mix_mean(&fresh, &parent, 0.0), vec![0.0, 2.0]);
        assert_eq!(mix_mean(&fresh, &parent, 1.0), vec![2.0, 0.0]);
    }

    #[test]
    fn generators_record_mixing() {
        let cfg = small_config();
        let gens = make_class_generators(&cfg).unwrap();
        assert_eq!(gens.len(), 6 + 2 * 3);
        for g in &gens[6..] {
            let parent = g.parent_base_id.unwrap();
            let expected = mix_mean(&g.fresh_direction, &gens[parent].true_mean, g.mixing);
            assert_eq!(g.true_mean, expected);
        }
        // Round-robin parent assignment.
        assert_eq!(gens[6].parent_base_id, Some(0));
        assert_eq!(gens[7].parent_base_id, Some(1));
    }

    #[test]
    fn base_means_on_radius() {
        let cfg = small_config();
        let gens = make_class_generators(&cfg).unwrap();
        for g in &gens[..6] {
            assert_relative_eq!(
                crate::linalg::norm(&g.true_mean),
                cfg.separation_radius,
                epsilon = 1e-9
            );
        }
        assert!(min_pairwise_mean_distance(&gens[..6]) > 0.0);
    }

    #[test]
    fn session_shape_and_counts() {
        let cfg = small_config();
        let sessions = generate_benchmark(&cfg).unwrap();
        assert_eq!(sessions.len(), 4);
        assert_eq!(sessions[0].labeled.len(), 6 * 40);
        assert!(sessions[0].unlabeled.is_empty());
        assert_eq!(sessions[0].test.len(), 6 * 4);
        for t in 1..=3 {
            let s = &sessions[t];
            assert_eq!(s.session_index, t);
            assert_eq!(s.labeled.len(), 2 * 3);
            assert_eq!(s.unlabeled.len(), 10);
            assert_eq!(s.test.len(), (6 + 2 * t) * 4);
            // New classes only in the labeled shots.
            for lf in &s.labeled {
                assert!(lf.class_id >= 6 + 2 * (t - 1) && lf.class_id < 6 + 2 * t);
            }
            // Hidden pool labels stay within classes seen so far.
            for p in &s.unlabeled {
                assert!(p.hidden_class < 6 + 2 * t);
            }
        }
    }

    #[test]
    fn ratio_one_pool_is_all_base() {
        let cfg = ExperimentConfig {
            base_to_novel_ratio: 1.0,
            ..small_config()
        };
        let sessions = generate_benchmark(&cfg).unwrap();
        for s in &sessions[1..] {
            assert!(s.unlabeled.iter().all(|p| p.hidden_class < 6));
        }
    }

    #[test]
    fn half_ratio_splits_exactly() {
        let cfg = ExperimentConfig {
            base_to_novel_ratio: 0.5,
            unlabeled_count: 50,
            ..small_config()
        };
        let sessions = generate_benchmark(&cfg).unwrap();
        for s in &sessions[1..] {
            let base = s.unlabeled.iter().filter(|p| p.hidden_class < 6).count();
            assert_eq!(base, 25);
            assert_eq!(s.unlabeled.len() - base, 25);
        }
    }

    #[test]
    fn fractional_ratio_rounds_toward_base() {
        let cfg = ExperimentConfig {
            base_to_novel_ratio: 0.33,
            unlabeled_count: 10,
            ..small_config()
        };
        let sessions = generate_benchmark(&cfg).unwrap();
        let base = sessions[1]
            .unlabeled
            .iter()
            .filter(|p| p.hidden_class < 6)
            .count();
        assert_eq!(base, 4); // ceil(3.3)
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let cfg = small_config();
        let a = generate_benchmark(&cfg).unwrap();
        let b = generate_benchmark(&cfg).unwrap();
        assert_eq!(a, b);
        let cfg2 = ExperimentConfig { seed: 6, ..cfg };
        let c = generate_benchmark(&cfg2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn splits_share_no_instances() {
        let cfg = small_config();
        let sessions = generate_benchmark(&cfg).unwrap();
        let mut seen: std::collections::HashSet<Vec<u64>> = std::collections::HashSet::new();
        let mut push = |v: &FeatureVector| {
            let key: Vec<u64> = v.components().iter().map(|c| c.to_bits()).collect();
            assert!(seen.insert(key), "duplicate feature instance across splits");
        };
        for s in &sessions {
            s.labeled.iter().for_each(|lf| push(&lf.vector));
            s.unlabeled.iter().for_each(|p| push(&p.feature));
            s.test.iter().for_each(|lf| push(&lf.vector));
        }
    }

    #[test]
    fn empirical_means_near_truth() {
        // Per-class count 40 >= 10·d with d=4; bound is 4·σ_max/√n.
        let cfg = small_config();
        let gens = make_class_generators(&cfg).unwrap();
        let sessions = generate_benchmark(&cfg).unwrap();
        let bound = 4.0 / (cfg.base_samples_per_class as f64).sqrt();
        for class_id in 0..cfg.base_class_count {
            let member: Vec<&LabeledFeature> = sessions[0]
                .labeled
                .iter()
                .filter(|lf| lf.class_id == class_id)
                .collect();
            assert_eq!(member.len(), cfg.base_samples_per_class);
            for j in 0..cfg.dim {
                let emp: f64 = member.iter().map(|lf| lf.vector.components()[j]).sum::<f64>()
                    / member.len() as f64;
                assert!(
                    (emp - gens[class_id].true_mean[j]).abs() <= bound,
                    "component {j} of class {class_id} off by more than 4σ/√n"
                );
            }
        }
    }

    #[test]
    fn insufficient_generators_rejected() {
        let cfg = small_config();
        let gens = make_class_generators(&cfg).unwrap();
        let err = generate_sessions(&gens[..4], &cfg).unwrap_err();
        assert!(matches!(err, Error::ClassBudget { needed: 12, available: 4 }));
    }
}
