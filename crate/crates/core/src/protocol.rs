//! Session orchestration: runs the base session and the incremental
//! sessions under a chosen strategy, maintains the evolving state
//! (weights, frozen base statistics, threshold), and collects per-session
//! metrics into a run report.

use std::collections::BTreeMap;

use crate::alt::{self, Partition, SimilarityScores, Threshold};
use crate::b2n::{self, ClassStatistics};
use crate::classifier::{self, ClassifierWeights, PrototypeMemory};
use crate::datagen::{self, SessionData};
use crate::error::{Error, Result};
use crate::seeding;
use crate::types::{ExperimentConfig, FeatureVector, LabeledFeature, Strategy};

/// Everything carried from one session to the next. Base statistics are
/// computed once in session 0 and never mutated afterward; the prototype
/// memory accumulates per-class sums so later updates shift weights in
/// proportion to the new evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionState {
    pub weights: ClassifierWeights,
    pub base_stats: BTreeMap<usize, ClassStatistics>,
    pub memory: PrototypeMemory,
    pub threshold: Threshold,
    pub session_index: usize,
}

/// Per-session outcome numbers. Accuracies are percentages in [0, 100];
/// `pseudo_precision` is a fraction in [0, 1] and absent when nothing was
/// pseudo-labeled; `acc_novel` is absent while no novel class exists.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionMetrics {
    pub session_index: usize,
    pub acc_all: f64,
    pub acc_base: Option<f64>,
    pub acc_novel: Option<f64>,
    pub pseudo_precision: Option<f64>,
    pub n_confident: usize,
    pub n_ambiguous: usize,
    pub n_generated: usize,
    pub tau_used: f64,
}

/// One full run: the config it came from, one metrics row per session,
/// and the average of the (report-rounded) per-session accuracies.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub label: String,
    pub config: ExperimentConfig,
    pub sessions: Vec<SessionMetrics>,
    pub avg_all: f64,
}

/// Intermediate products of one incremental session, for diagnostics and
/// bookkeeping tests: the dual-branch scores, the pool partition, and the
/// exact augmented set the weight update consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionTrace {
    pub scores: Option<SimilarityScores>,
    pub partition: Partition,
    pub augmented: Vec<LabeledFeature>,
}

/// Rounds to the two decimal places used in report tables.
pub fn round_percent(x: f64) -> f64 {
    format!("{x:.2}").parse().expect("formatted float reparses")
}

fn mean_of_rounded(sessions: &[SessionMetrics]) -> f64 {
    let sum: f64 = sessions.iter().map(|s| round_percent(s.acc_all)).sum();
    sum / sessions.len() as f64
}

/// Trains the base session: prototype weights over all base classes and
/// the frozen per-class statistics used by calibration later on. The
/// threshold starts at the configured static value.
pub fn run_base_session(config: &ExperimentConfig, session0: &SessionData) -> Result<SessionState> {
    if session0.session_index != 0 {
        return Err(Error::SessionIndex {
            expected: 0,
            actual: session0.session_index,
        });
    }
    let base_classes = config.base_class_set();
    let weights = classifier::init_base_weights(&base_classes, &session0.labeled)?;
    let memory = PrototypeMemory::from_samples(&session0.labeled)?;
    let mut base_stats = BTreeMap::new();
    for &class_id in base_classes.class_ids() {
        let members: Vec<FeatureVector> = session0
            .labeled
            .iter()
            .filter(|lf| lf.class_id == class_id)
            .map(|lf| lf.vector.clone())
            .collect();
        base_stats.insert(class_id, b2n::class_statistics(&members, class_id)?);
    }
    Ok(SessionState {
        weights,
        base_stats,
        memory,
        threshold: Threshold {
            tau: config.static_threshold,
            m: config.m,
            n_scored: 0,
        },
        session_index: 0,
    })
}

fn select_threshold(
    strategy: Strategy,
    scores: Option<&SimilarityScores>,
    config: &ExperimentConfig,
    previous: &Threshold,
) -> Result<Threshold> {
    match strategy {
        Strategy::Baseline => Ok(Threshold {
            // Sentinel below any possible gap: the whole pool is confident.
            tau: -1.0,
            m: config.m,
            n_scored: scores.map_or(0, |s| s.len()),
        }),
        Strategy::Static => Ok(Threshold {
            tau: config.static_threshold,
            m: config.m,
            n_scored: scores.map_or(0, |s| s.len()),
        }),
        Strategy::Dynamic | Strategy::Drop => match scores {
            Some(s) => alt::compute_threshold(s, config.m),
            None => Ok(*previous),
        },
    }
}

/// Runs one incremental session and returns the updated state, the
/// metrics, and the intermediate trace.
pub fn run_incremental_session_traced(
    state: &SessionState,
    data: &SessionData,
    strategy: Strategy,
    config: &ExperimentConfig,
) -> Result<(SessionState, SessionMetrics, SessionTrace)> {
    let t = state.session_index + 1;
    if data.session_index != t {
        return Err(Error::SessionIndex {
            expected: t,
            actual: data.session_index,
        });
    }

    // 1. Novel weights from this session's labeled shots.
    let new_class_ids: Vec<usize> = data.labeled.iter().map(|lf| lf.class_id).collect();
    let new_classes = crate::types::ClassSet::new(t, new_class_ids);
    let weights = classifier::init_novel_weights(&state.weights, &new_classes, &data.labeled)?;

    // 2. Dual-branch scoring of the pool. Hidden labels never cross this
    //    boundary: only the bare features are scored.
    let pool_features: Vec<FeatureVector> =
        data.unlabeled.iter().map(|p| p.feature.clone()).collect();
    let scores = if pool_features.is_empty() {
        None
    } else {
        Some(alt::score_unlabeled(&pool_features, &weights)?)
    };

    // 3. Threshold per strategy, then partition.
    let threshold = select_threshold(strategy, scores.as_ref(), config, &state.threshold)?;
    let partition = match &scores {
        Some(s) => alt::partition(s, &threshold),
        None => Partition {
            confident: Vec::new(),
            ambiguous: Vec::new(),
        },
    };

    // 4. Pseudo-labels for the confident share.
    let pseudo_labeled: Vec<LabeledFeature> = partition
        .confident
        .iter()
        .map(|&(i, class_id)| LabeledFeature::new(data.unlabeled[i].feature.clone(), class_id))
        .collect();

    // 5. Calibrated feature generation for the strategies that keep the
    //    ambiguous samples.
    let ambiguous_pairs: Vec<(usize, usize)> = partition
        .ambiguous
        .iter()
        .map(|&(_, base_arg, novel_arg)| (base_arg, novel_arg))
        .collect();
    let mut generated: Vec<LabeledFeature> = Vec::new();
    if matches!(strategy, Strategy::Static | Strategy::Dynamic) {
        for &class_id in new_classes.class_ids() {
            let mut stat_inputs: Vec<FeatureVector> = data
                .labeled
                .iter()
                .filter(|lf| lf.class_id == class_id)
                .map(|lf| lf.vector.clone())
                .collect();
            if config.include_ambiguous_in_stats {
                for &(i, _, novel_arg) in &partition.ambiguous {
                    if novel_arg == class_id {
                        stat_inputs.push(data.unlabeled[i].feature.clone());
                    }
                }
            }
            let novel_stats = b2n::class_statistics(&stat_inputs, class_id)?;
            let novel_weight = weights
                .weight(class_id)
                .ok_or(Error::UnknownClass(class_id))?;
            let selected_ids = b2n::select_base_classes(
                class_id,
                &ambiguous_pairs,
                &state.base_stats,
                novel_weight,
                config.k_base,
            );
            let selected: Vec<&ClassStatistics> = selected_ids
                .iter()
                .map(|id| &state.base_stats[id])
                .collect();
            let dist = b2n::calibrate(&novel_stats, &selected, config.alpha)?;
            let mut rng = seeding::generation_rng(config.seed, t, class_id);
            for feature in b2n::sample_features(&dist, config.generated_per_class, &mut rng)? {
                generated.push(LabeledFeature::new(feature, class_id));
            }
        }
    }
    let n_generated = generated.len();

    // 6. Weight update from shots ∪ pseudo-labeled ∪ generated. Novel
    //    classes are re-estimated from the augmented samples directly;
    //    base classes refresh through their stored running means, since
    //    their session-0 data is gone but its statistics survive.
    let mut augmented: Vec<LabeledFeature> = data.labeled.clone();
    augmented.extend(pseudo_labeled.iter().cloned());
    augmented.extend(generated);
    if !config.update_base_weights {
        augmented.retain(|lf| !weights.is_base(lf.class_id));
    }
    let (base_part, novel_part): (Vec<LabeledFeature>, Vec<LabeledFeature>) = augmented
        .iter()
        .cloned()
        .partition(|lf| weights.is_base(lf.class_id));
    let weights = classifier::update_weights(&weights, &novel_part)?;
    let (weights, memory) = classifier::update_weights_anchored(&weights, &state.memory, &base_part)?;

    // 7. Evaluation over every seen class.
    let eval = classifier::evaluate(&data.test, &weights)?;

    let pseudo_precision = if partition.confident.is_empty() {
        None
    } else {
        let correct = partition
            .confident
            .iter()
            .filter(|&&(i, class_id)| data.unlabeled[i].hidden_class == class_id)
            .count();
        Some(correct as f64 / partition.confident.len() as f64)
    };

    let metrics = SessionMetrics {
        session_index: t,
        acc_all: eval.acc_all,
        acc_base: eval.acc_base,
        acc_novel: eval.acc_novel,
        pseudo_precision,
        n_confident: partition.confident.len(),
        n_ambiguous: partition.ambiguous.len(),
        n_generated,
        tau_used: threshold.tau,
    };
    let next = SessionState {
        weights,
        base_stats: state.base_stats.clone(),
        memory,
        threshold,
        session_index: t,
    };
    let trace = SessionTrace {
        scores,
        partition,
        augmented,
    };
    Ok((next, metrics, trace))
}

/// Runs one incremental session.
pub fn run_incremental_session(
    state: &SessionState,
    data: &SessionData,
    strategy: Strategy,
    config: &ExperimentConfig,
) -> Result<(SessionState, SessionMetrics)> {
    run_incremental_session_traced(state, data, strategy, config)
        .map(|(state, metrics, _)| (state, metrics))
}

fn session_zero_metrics(
    config: &ExperimentConfig,
    state: &SessionState,
    session0: &SessionData,
) -> Result<SessionMetrics> {
    let eval = classifier::evaluate(&session0.test, &state.weights)?;
    Ok(SessionMetrics {
        session_index: 0,
        acc_all: eval.acc_all,
        acc_base: eval.acc_base,
        acc_novel: eval.acc_novel,
        pseudo_precision: None,
        n_confident: 0,
        n_ambiguous: 0,
        n_generated: 0,
        tau_used: config.static_threshold,
    })
}

/// Runs all sessions of a prebuilt benchmark under an explicit strategy.
pub fn run_on_benchmark(
    config: &ExperimentConfig,
    strategy: Strategy,
    sessions: &[SessionData],
) -> Result<RunReport> {
    if sessions.is_empty() {
        return Err(Error::EmptyInput("benchmark"));
    }
    let mut state = run_base_session(config, &sessions[0])?;
    let mut metrics = vec![session_zero_metrics(config, &state, &sessions[0])?];
    for data in &sessions[1..] {
        let (next, session_metrics) =
            run_incremental_session(&state, data, strategy, config)?;
        state = next;
        metrics.push(session_metrics);
    }
    let avg_all = mean_of_rounded(&metrics);
    Ok(RunReport {
        label: strategy.as_str().to_string(),
        config: ExperimentConfig {
            strategy,
            ..config.clone()
        },
        sessions: metrics,
        avg_all,
    })
}

/// Generates the benchmark for the config and runs it under the config's
/// strategy. Deterministic for a fixed seed.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let sessions = datagen::generate_benchmark(config)?;
    run_on_benchmark(config, config.strategy, &sessions)
}

/// Runs all four strategies on the identical seed-generated benchmark.
/// Reports come back in fixed row order: baseline, drop, static, dynamic.
pub fn run_ablation(config: &ExperimentConfig) -> Result<Vec<RunReport>> {
    config.validate()?;
    let sessions = datagen::generate_benchmark(config)?;
    Strategy::all()
        .iter()
        .map(|&strategy| run_on_benchmark(config, strategy, &sessions))
        .collect()
}

/// Hyperparameters the sweep runner can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    UnlabeledCount,
    BaseToNovelRatio,
    Smoothing,
    Alpha,
}

impl SweepParam {
    pub fn key(&self) -> &'static str {
        match self {
            SweepParam::UnlabeledCount => "unlabeled_count",
            SweepParam::BaseToNovelRatio => "base_to_novel_ratio",
            SweepParam::Smoothing => "m",
            SweepParam::Alpha => "alpha",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "unlabeled_count" => Ok(SweepParam::UnlabeledCount),
            "base_to_novel_ratio" => Ok(SweepParam::BaseToNovelRatio),
            "m" => Ok(SweepParam::Smoothing),
            "alpha" => Ok(SweepParam::Alpha),
            other => Err(Error::InvalidConfig(format!(
                "sweep parameter must be one of unlabeled_count|base_to_novel_ratio|m|alpha, got {other:?}"
            ))),
        }
    }

    fn apply(&self, config: &ExperimentConfig, value: f64) -> Result<(ExperimentConfig, String)> {
        let mut cfg = config.clone();
        let label = match self {
            SweepParam::UnlabeledCount => {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "unlabeled_count sweep value must be a non-negative integer, got {value}"
                    )));
                }
                cfg.unlabeled_count = value as usize;
                format!("{}={}", self.key(), value as usize)
            }
            SweepParam::BaseToNovelRatio => {
                cfg.base_to_novel_ratio = value;
                format!("{}={}", self.key(), value)
            }
            SweepParam::Smoothing => {
                cfg.m = value;
                format!("{}={}", self.key(), value)
            }
            SweepParam::Alpha => {
                cfg.alpha = value;
                format!("{}={}", self.key(), value)
            }
        };
        Ok((cfg, label))
    }
}

/// One experiment per grid value. The benchmark is regenerated per point
/// with the same master seed, so points differ only in the swept value.
pub fn sweep(
    config: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
) -> Result<Vec<RunReport>> {
    if values.is_empty() {
        return Err(Error::EmptyInput("sweep grid"));
    }
    values
        .iter()
        .map(|&value| {
            let (cfg, label) = param.apply(config, value)?;
            let mut report = run_experiment(&cfg)?;
            report.label = label;
            Ok(report)
        })
        .collect()
}
