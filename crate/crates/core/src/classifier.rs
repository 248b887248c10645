//! Cosine-prototype classifier. Class weights are unit-normalized class
//! means; classification is argmax cosine similarity over every seen class
//! jointly, with ties broken by the lowest class id.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg;
use crate::types::{ClassSet, FeatureVector, LabeledFeature};

/// Unit-norm per-class weight vectors, partitioned into the base block and
/// one novel block per incremental session.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierWeights {
    weights: BTreeMap<usize, Vec<f64>>,
    base_ids: ClassSet,
    novel_ids_by_session: Vec<ClassSet>,
    dim: usize,
}

impl ClassifierWeights {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, class_id: usize) -> Option<&[f64]> {
        self.weights.get(&class_id).map(|w| w.as_slice())
    }

    pub fn class_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.keys().copied()
    }

    pub fn base_ids(&self) -> &ClassSet {
        &self.base_ids
    }

    pub fn novel_ids_by_session(&self) -> &[ClassSet] {
        &self.novel_ids_by_session
    }

    pub fn is_base(&self, class_id: usize) -> bool {
        self.base_ids.contains(class_id)
    }

    pub fn has_novel(&self) -> bool {
        self.novel_ids_by_session.iter().any(|s| !s.is_empty())
    }

    /// Iterates (class_id, weight) over the base block in id order.
    pub fn base_block(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.weights
            .iter()
            .filter(|(id, _)| self.base_ids.contains(**id))
            .map(|(id, w)| (*id, w.as_slice()))
    }

    /// Iterates (class_id, weight) over every novel block in id order.
    pub fn novel_block(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.weights
            .iter()
            .filter(|(id, _)| !self.base_ids.contains(**id))
            .map(|(id, w)| (*id, w.as_slice()))
    }
}

fn normalized_class_mean(class_id: usize, members: &[&FeatureVector], dim: usize) -> Result<Vec<f64>> {
    let mean = linalg::mean_of(members.iter().map(|v| v.components()), dim);
    let norm = linalg::norm(&mean);
    if norm <= 0.0 || !norm.is_finite() {
        return Err(Error::DegeneratePrototype(class_id));
    }
    Ok(mean.into_iter().map(|x| x / norm).collect())
}

fn group_by_class<'a>(
    samples: &'a [LabeledFeature],
    dim: usize,
) -> Result<BTreeMap<usize, Vec<&'a FeatureVector>>> {
    let mut groups: BTreeMap<usize, Vec<&FeatureVector>> = BTreeMap::new();
    for lf in samples {
        if lf.vector.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: lf.vector.dim(),
            });
        }
        groups.entry(lf.class_id).or_default().push(&lf.vector);
    }
    Ok(groups)
}

/// Builds the base block from session-0 data: one normalized class-mean
/// weight per base class. Every expected class must have at least one
/// sample and no stray labels are allowed.
pub fn init_base_weights(
    base_classes: &ClassSet,
    base_samples: &[LabeledFeature],
) -> Result<ClassifierWeights> {
    if base_samples.is_empty() {
        return Err(Error::EmptyInput("base samples"));
    }
    let dim = base_samples[0].vector.dim();
    let groups = group_by_class(base_samples, dim)?;
    for id in groups.keys() {
        if !base_classes.contains(*id) {
            return Err(Error::UnknownClass(*id));
        }
    }
    let mut weights = BTreeMap::new();
    for &class_id in base_classes.class_ids() {
        let members = groups
            .get(&class_id)
            .ok_or(Error::MissingClass(class_id))?;
        weights.insert(class_id, normalized_class_mean(class_id, members, dim)?);
    }
    Ok(ClassifierWeights {
        weights,
        base_ids: base_classes.clone(),
        novel_ids_by_session: Vec::new(),
        dim,
    })
}

/// Adds one session's novel classes as normalized shot means. Existing
/// weights are carried over bit-identically.
pub fn init_novel_weights(
    weights: &ClassifierWeights,
    new_classes: &ClassSet,
    shots: &[LabeledFeature],
) -> Result<ClassifierWeights> {
    let groups = group_by_class(shots, weights.dim)?;
    for id in groups.keys() {
        if !new_classes.contains(*id) {
            return Err(Error::UnknownClass(*id));
        }
    }
    let mut out = weights.clone();
    for &class_id in new_classes.class_ids() {
        if out.weights.contains_key(&class_id) {
            return Err(Error::DuplicateClass(class_id));
        }
        let members = groups
            .get(&class_id)
            .ok_or(Error::MissingClass(class_id))?;
        out.weights
            .insert(class_id, normalized_class_mean(class_id, members, weights.dim)?);
    }
    out.novel_ids_by_session.push(new_classes.clone());
    Ok(out)
}

fn classify_against<'a, I>(feature: &FeatureVector, block: I, index: usize) -> Result<(usize, f64)>
where
    I: Iterator<Item = (usize, &'a [f64])>,
{
    let norm = feature.l2_norm();
    if norm <= 0.0 || !norm.is_finite() {
        return Err(Error::ZeroNormFeature(index));
    }
    let mut best: Option<(usize, f64)> = None;
    for (class_id, w) in block {
        let score = linalg::dot(feature.components(), w) / norm;
        // Strict > keeps the lowest class id on exact ties because blocks
        // iterate in ascending id order.
        match best {
            Some((_, s)) if score > s => best = Some((class_id, score)),
            None => best = Some((class_id, score)),
            _ => {}
        }
    }
    best.ok_or(Error::EmptyInput("weight block"))
}

/// Joint prediction over all seen classes: per feature, the argmax-cosine
/// class and its score.
pub fn classify(
    features: &[FeatureVector],
    weights: &ClassifierWeights,
) -> Result<Vec<(usize, f64)>> {
    features
        .iter()
        .enumerate()
        .map(|(i, f)| classify_one(f, weights, i))
        .collect()
}

pub(crate) fn classify_one(
    feature: &FeatureVector,
    weights: &ClassifierWeights,
    index: usize,
) -> Result<(usize, f64)> {
    classify_against(
        feature,
        weights.weights.iter().map(|(id, w)| (*id, w.as_slice())),
        index,
    )
}

pub(crate) fn classify_block<'a, I>(feature: &FeatureVector, block: I, index: usize) -> Result<(usize, f64)>
where
    I: Iterator<Item = (usize, &'a [f64])>,
{
    classify_against(feature, block, index)
}

/// Re-estimates weights from an augmented sample set: every class with at
/// least one augmented sample gets the normalized mean of exactly those
/// samples; absent classes keep their previous weights.
pub fn update_weights(
    weights: &ClassifierWeights,
    augmented: &[LabeledFeature],
) -> Result<ClassifierWeights> {
    let groups = group_by_class(augmented, weights.dim)?;
    let mut out = weights.clone();
    for (class_id, members) in &groups {
        if !out.weights.contains_key(class_id) {
            return Err(Error::UnknownClass(*class_id));
        }
        out.weights
            .insert(*class_id, normalized_class_mean(*class_id, members, weights.dim)?);
    }
    Ok(out)
}

/// Running per-class sufficient statistics (component sum and sample
/// count) for incremental prototype estimation. Raw data from earlier
/// sessions is unavailable, so each class's history survives here and new
/// samples shift the prototype in proportion to their count instead of
/// replacing it.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeMemory {
    entries: BTreeMap<usize, MemoryEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemoryEntry {
    pub sum: Vec<f64>,
    pub count: usize,
}

impl PrototypeMemory {
    pub fn new() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn from_samples(samples: &[LabeledFeature]) -> Result<Self> {
        let mut memory = Self::new();
        memory.absorb(samples)?;
        Ok(memory)
    }

    /// Adds samples into the per-class running sums.
    pub fn absorb(&mut self, samples: &[LabeledFeature]) -> Result<()> {
        for lf in samples {
            let entry = self.entries.entry(lf.class_id).or_insert_with(|| MemoryEntry {
                sum: vec![0.0; lf.vector.dim()],
                count: 0,
            });
            if entry.sum.len() != lf.vector.dim() {
                return Err(Error::DimensionMismatch {
                    expected: entry.sum.len(),
                    actual: lf.vector.dim(),
                });
            }
            for (s, x) in entry.sum.iter_mut().zip(lf.vector.components()) {
                *s += x;
            }
            entry.count += 1;
        }
        Ok(())
    }

    pub fn entry(&self, class_id: usize) -> Option<&MemoryEntry> {
        self.entries.get(&class_id)
    }

    pub fn count(&self, class_id: usize) -> usize {
        self.entries.get(&class_id).map_or(0, |e| e.count)
    }

    pub fn class_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }
}

impl Default for PrototypeMemory {
    fn default() -> Self {
        Self::new()
    }
}

/// Count-weighted prototype update: absorbs the new samples into the
/// memory, then resets each touched class's weight to its normalized
/// running mean. Classes without new samples keep their weights.
pub fn update_weights_anchored(
    weights: &ClassifierWeights,
    memory: &PrototypeMemory,
    new_samples: &[LabeledFeature],
) -> Result<(ClassifierWeights, PrototypeMemory)> {
    for lf in new_samples {
        if !weights.weights.contains_key(&lf.class_id) {
            return Err(Error::UnknownClass(lf.class_id));
        }
    }
    let mut memory = memory.clone();
    memory.absorb(new_samples)?;
    let mut out = weights.clone();
    let mut touched: Vec<usize> = new_samples.iter().map(|lf| lf.class_id).collect();
    touched.sort_unstable();
    touched.dedup();
    for class_id in touched {
        let entry = memory
            .entry(class_id)
            .ok_or(Error::MissingClass(class_id))?;
        let norm = linalg::norm(&entry.sum);
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::DegeneratePrototype(class_id));
        }
        out.weights.insert(
            class_id,
            entry.sum.iter().map(|x| x / norm).collect(),
        );
    }
    Ok((out, memory))
}

/// Joint accuracy over a test set, plus the base-only and novel-only
/// breakdowns. Accuracies are percentages; a group with no samples
/// reports `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalMetrics {
    pub acc_all: f64,
    pub acc_base: Option<f64>,
    pub acc_novel: Option<f64>,
    pub n_all: usize,
    pub n_base: usize,
    pub n_novel: usize,
}

pub fn evaluate(test: &[LabeledFeature], weights: &ClassifierWeights) -> Result<EvalMetrics> {
    if test.is_empty() {
        return Err(Error::EmptyInput("test set"));
    }
    let mut n_base = 0usize;
    let mut n_novel = 0usize;
    let mut correct_all = 0usize;
    let mut correct_base = 0usize;
    let mut correct_novel = 0usize;
    for (i, lf) in test.iter().enumerate() {
        if weights.weight(lf.class_id).is_none() {
            return Err(Error::UnknownClass(lf.class_id));
        }
        let (predicted, _) = classify_one(&lf.vector, weights, i)?;
        let hit = predicted == lf.class_id;
        if weights.is_base(lf.class_id) {
            n_base += 1;
            correct_base += hit as usize;
        } else {
            n_novel += 1;
            correct_novel += hit as usize;
        }
        correct_all += hit as usize;
    }
    let pct = |c: usize, n: usize| 100.0 * c as f64 / n as f64;
    Ok(EvalMetrics {
        acc_all: pct(correct_all, test.len()),
        acc_base: (n_base > 0).then(|| pct(correct_base, n_base)),
        acc_novel: (n_novel > 0).then(|| pct(correct_novel, n_novel)),
        n_all: test.len(),
        n_base,
        n_novel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fv(components: &[f64]) -> FeatureVector {
        FeatureVector::new(components.to_vec()).unwrap()
    }

    fn lf(components: &[f64], class_id: usize) -> LabeledFeature {
        LabeledFeature::new(fv(components), class_id)
    }

    fn base_two() -> ClassifierWeights {
        let classes = ClassSet::new(0, vec![0, 1]);
        init_base_weights(
            &classes,
            &[lf(&[1.0, 0.0], 0), lf(&[0.0, 1.0], 1)],
        )
        .unwrap()
    }

    #[test]
    fn identical_samples_give_their_direction() {
        let classes = ClassSet::new(0, vec![0]);
        let w = init_base_weights(&classes, &[lf(&[1.0, 0.0], 0), lf(&[1.0, 0.0], 0)]).unwrap();
        assert_eq!(w.weight(0).unwrap(), &[1.0, 0.0]);
    }

    #[test]
    fn prototype_is_normalized_mean() {
        let classes = ClassSet::new(0, vec![0]);
        let w = init_base_weights(&classes, &[lf(&[2.0, 0.0], 0), lf(&[0.0, 2.0], 0)]).unwrap();
        let expected = (2.0f64).sqrt() / 2.0;
        let got = w.weight(0).unwrap();
        assert_relative_eq!(got[0], expected, epsilon = 1e-12);
        assert_relative_eq!(got[1], expected, epsilon = 1e-12);
    }

    #[test]
    fn zero_mean_is_degenerate() {
        let classes = ClassSet::new(0, vec![0]);
        let err =
            init_base_weights(&classes, &[lf(&[1.0, 0.0], 0), lf(&[-1.0, 0.0], 0)]).unwrap_err();
        assert!(matches!(err, Error::DegeneratePrototype(0)));
    }

    #[test]
    fn missing_base_class_rejected() {
        let classes = ClassSet::new(0, vec![0, 1]);
        let err = init_base_weights(&classes, &[lf(&[1.0, 0.0], 0)]).unwrap_err();
        assert!(matches!(err, Error::MissingClass(1)));
    }

    #[test]
    fn single_shot_novel_weight() {
        let w = base_two();
        let novel = ClassSet::new(1, vec![60]);
        let w2 = init_novel_weights(&w, &novel, &[lf(&[0.0, 1.0], 60)]).unwrap();
        assert_eq!(w2.weight(60).unwrap(), &[0.0, 1.0]);
        assert_eq!(w2.len(), 3);
        // Prior weights untouched, bit for bit.
        assert_eq!(w2.weight(0), w.weight(0));
        assert_eq!(w2.weight(1), w.weight(1));
    }

    #[test]
    fn novel_collision_rejected() {
        let w = base_two();
        let novel = ClassSet::new(1, vec![60]);
        let w2 = init_novel_weights(&w, &novel, &[lf(&[0.0, 1.0], 60)]).unwrap();
        let again = ClassSet::new(2, vec![60]);
        let err = init_novel_weights(&w2, &again, &[lf(&[1.0, 0.0], 60)]).unwrap_err();
        assert!(matches!(err, Error::DuplicateClass(60)));
    }

    #[test]
    fn adding_five_classes_to_sixty() {
        let ids: Vec<usize> = (0..60).collect();
        let classes = ClassSet::new(0, ids.clone());
        let samples: Vec<LabeledFeature> = ids
            .iter()
            .map(|&i| {
                let mut v = vec![0.0; 64];
                v[i] = 1.0;
                lf(&v, i)
            })
            .collect();
        let w = init_base_weights(&classes, &samples).unwrap();
        let novel = ClassSet::new(1, (60..65).collect());
        let shots: Vec<LabeledFeature> = (60..65)
            .map(|i| {
                let mut v = vec![0.0; 64];
                v[i - 60] = 1.0;
                v[63] = 2.0;
                lf(&v, i)
            })
            .collect();
        let w2 = init_novel_weights(&w, &novel, &shots).unwrap();
        assert_eq!(w2.len(), 65);
    }

    #[test]
    fn classify_self_match() {
        let classes = ClassSet::new(0, vec![0, 1]);
        let w = init_base_weights(
            &classes,
            &[lf(&[1.0, 0.0, 0.0], 0), lf(&[0.0, 1.0, 0.0], 1)],
        )
        .unwrap();
        let novel = ClassSet::new(1, vec![3]);
        let w2 = init_novel_weights(&w, &novel, &[lf(&[0.0, 0.0, 1.0], 3)]).unwrap();
        let result = classify(&[fv(&[0.0, 0.0, 2.0])], &w2).unwrap();
        assert_eq!(result[0].0, 3);
        assert_relative_eq!(result[0].1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn exact_tie_goes_to_lowest_id() {
        let classes = ClassSet::new(0, vec![4, 9]);
        // Both classes end up with the identical weight vector.
        let w = init_base_weights(&classes, &[lf(&[1.0, 1.0], 4), lf(&[2.0, 2.0], 9)]).unwrap();
        let result = classify(&[fv(&[3.0, 3.0])], &w).unwrap();
        assert_eq!(result[0].0, 4);
    }

    #[test]
    fn classify_hand_cosine() {
        let classes = ClassSet::new(0, vec![0, 1]);
        let s = (2.0f64).sqrt() / 2.0;
        let w = init_base_weights(&classes, &[lf(&[1.0, 0.0], 0), lf(&[s, s], 1)]).unwrap();
        let result = classify(&[fv(&[1.0, 0.0])], &w).unwrap();
        assert_eq!(result[0].0, 0);
        assert_relative_eq!(result[0].1, 1.0, epsilon = 1e-12);
        // Runner-up score is the cosine against the diagonal weight.
        let runner = linalg::dot(&[1.0, 0.0], w.weight(1).unwrap());
        assert_relative_eq!(runner, s, epsilon = 1e-12);
    }

    #[test]
    fn zero_norm_feature_rejected() {
        let w = base_two();
        let err = classify(&[fv(&[1.0, 0.0]), FeatureVector::new(vec![0.0, 0.0]).unwrap()], &w)
            .unwrap_err();
        assert!(matches!(err, Error::ZeroNormFeature(1)));
    }

    #[test]
    fn scale_invariance() {
        let w = base_two();
        for scale in [0.1, 3.0, 250.0] {
            let a = classify(&[fv(&[0.6, 0.8])], &w).unwrap();
            let b = classify(&[fv(&[0.6 * scale, 0.8 * scale])], &w).unwrap();
            assert_eq!(a[0].0, b[0].0);
            assert_relative_eq!(a[0].1, b[0].1, epsilon = 1e-12);
        }
    }

    #[test]
    fn update_is_fixed_point_on_original_samples() {
        let classes = ClassSet::new(0, vec![0, 1]);
        let samples = vec![
            lf(&[2.0, 1.0], 0),
            lf(&[1.5, 0.5], 0),
            lf(&[0.2, 3.0], 1),
            lf(&[-0.2, 2.0], 1),
        ];
        let w = init_base_weights(&classes, &samples).unwrap();
        let w2 = update_weights(&w, &samples).unwrap();
        for id in [0usize, 1] {
            for (a, b) in w.weight(id).unwrap().iter().zip(w2.weight(id).unwrap()) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn update_mixes_shots_and_generated() {
        let w = base_two();
        let novel = ClassSet::new(1, vec![60]);
        let w2 = init_novel_weights(&w, &novel, &[lf(&[0.0, 1.0], 60)]).unwrap();
        let augmented = vec![lf(&[0.0, 1.0], 60), lf(&[0.0, 3.0], 60)];
        let w3 = update_weights(&w2, &augmented).unwrap();
        assert_eq!(w3.weight(60).unwrap(), &[0.0, 1.0]);
    }

    #[test]
    fn empty_update_returns_weights_unchanged() {
        let w = base_two();
        let w2 = update_weights(&w, &[]).unwrap();
        assert_eq!(w, w2);
    }

    #[test]
    fn update_rejects_unknown_class() {
        let w = base_two();
        let err = update_weights(&w, &[lf(&[1.0, 0.0], 99)]).unwrap_err();
        assert!(matches!(err, Error::UnknownClass(99)));
    }

    #[test]
    fn all_weights_unit_norm_after_update() {
        let classes = ClassSet::new(0, vec![0, 1]);
        let samples = vec![lf(&[5.0, 1.0], 0), lf(&[0.5, 9.0], 1)];
        let w = init_base_weights(&classes, &samples).unwrap();
        let w2 = update_weights(&w, &[lf(&[3.0, 4.0], 0)]).unwrap();
        for id in [0usize, 1] {
            assert_relative_eq!(linalg::norm(w2.weight(id).unwrap()), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn evaluate_perfect_prototypes() {
        let w = base_two();
        let metrics = evaluate(&[lf(&[1.0, 0.0], 0), lf(&[0.0, 1.0], 1)], &w).unwrap();
        assert_eq!(metrics.acc_all, 100.0);
        assert_eq!(metrics.acc_base, Some(100.0));
        assert_eq!(metrics.acc_novel, None); // no novel classes seen
    }

    #[test]
    fn evaluate_mixed_counts() {
        // 4 base samples with 3 correct, 2 novel samples with 1 correct.
        let classes = ClassSet::new(0, vec![0]);
        let w = init_base_weights(&classes, &[lf(&[1.0, 0.0, 0.0], 0)]).unwrap();
        let novel = ClassSet::new(1, vec![1, 2]);
        let w2 = init_novel_weights(
            &w,
            &novel,
            &[lf(&[0.0, 1.0, 0.0], 1), lf(&[0.0, 0.0, 1.0], 2)],
        )
        .unwrap();
        let test = vec![
            lf(&[1.0, 0.0, 0.0], 0),
            lf(&[1.0, 0.1, 0.0], 0),
            lf(&[0.9, 0.2, 0.0], 0),
            lf(&[0.0, 1.0, 0.1], 0), // wrong: predicted 1
            lf(&[0.0, 1.0, 0.0], 1),
            lf(&[1.0, 0.0, 0.2], 2), // wrong: predicted 0
        ];
        let metrics = evaluate(&test, &w2).unwrap();
        assert_relative_eq!(metrics.acc_all, 100.0 * 4.0 / 6.0, epsilon = 1e-12);
        assert_eq!(metrics.acc_base, Some(75.0));
        assert_eq!(metrics.acc_novel, Some(50.0));
        assert_eq!((metrics.n_base, metrics.n_novel), (4, 2));
    }

    #[test]
    fn evaluate_order_independent() {
        let w = base_two();
        let mut test = vec![
            lf(&[1.0, 0.2], 0),
            lf(&[0.3, 1.0], 1),
            lf(&[0.9, -0.1], 0),
            lf(&[1.0, 1.0], 1),
        ];
        let a = evaluate(&test, &w).unwrap();
        test.reverse();
        let b = evaluate(&test, &w).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_test_set_rejected() {
        let w = base_two();
        assert!(matches!(evaluate(&[], &w), Err(Error::EmptyInput("test set"))));
    }

    #[test]
    fn anchored_update_blends_by_count() {
        let classes = ClassSet::new(0, vec![0]);
        let samples = vec![lf(&[1.0, 0.0], 0), lf(&[1.0, 0.0], 0), lf(&[1.0, 0.0], 0)];
        let w = init_base_weights(&classes, &samples).unwrap();
        let memory = PrototypeMemory::from_samples(&samples).unwrap();
        let (w2, memory2) =
            update_weights_anchored(&w, &memory, &[lf(&[0.0, 1.0], 0)]).unwrap();
        // Running mean is (3·(1,0) + (0,1)) / 4 = (0.75, 0.25).
        let expected_norm = (0.75f64 * 0.75 + 0.25 * 0.25).sqrt();
        let got = w2.weight(0).unwrap();
        assert_relative_eq!(got[0], 0.75 / expected_norm, epsilon = 1e-12);
        assert_relative_eq!(got[1], 0.25 / expected_norm, epsilon = 1e-12);
        assert_eq!(memory2.count(0), 4);
    }

    #[test]
    fn anchored_update_leaves_untouched_classes() {
        let w = base_two();
        let memory =
            PrototypeMemory::from_samples(&[lf(&[1.0, 0.0], 0), lf(&[0.0, 1.0], 1)]).unwrap();
        let (w2, _) = update_weights_anchored(&w, &memory, &[lf(&[0.5, 0.5], 0)]).unwrap();
        assert_eq!(w2.weight(1), w.weight(1));
        assert_ne!(w2.weight(0), w.weight(0));
    }

    #[test]
    fn anchored_update_rejects_unknown_class() {
        let w = base_two();
        let memory = PrototypeMemory::new();
        assert!(matches!(
            update_weights_anchored(&w, &memory, &[lf(&[1.0, 0.0], 9)]),
            Err(Error::UnknownClass(9))
        ));
    }

    #[test]
    fn orthogonal_class_does_not_change_predictions() {
        let classes = ClassSet::new(0, vec![0, 1]);
        let w = init_base_weights(
            &classes,
            &[lf(&[1.0, 0.0, 0.0], 0), lf(&[0.0, 1.0, 0.0], 1)],
        )
        .unwrap();
        let features = vec![fv(&[0.9, 0.4, 0.0]), fv(&[0.1, 1.0, 0.0])];
        let before = classify(&features, &w).unwrap();
        let novel = ClassSet::new(1, vec![2]);
        let w2 = init_novel_weights(&w, &novel, &[lf(&[0.0, 0.0, 1.0], 2)]).unwrap();
        let after = classify(&features, &w2).unwrap();
        assert_eq!(before, after);
    }
}
