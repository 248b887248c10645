//! Stable text formats for feature datasets, experiment configs, and run
//! reports. Floats are written shortest-round-trip so `read(write(x))`
//! reproduces values exactly; accuracies in report tables are fixed to
//! two decimals.
//!
//! Formats:
//! * Feature file — header `dim=<d>,classes=<c>,samples=<n>`, then one
//!   `class_id,v1,...,vd` row per sample.
//! * Config file — one `key=value` line per [`ExperimentConfig`] field.
//! * Report file — a `run,s0,...,sT,avg` table with one row per run,
//!   followed by `[config <label>]` and `[session <label> <t>]` blocks.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::protocol::{RunReport, SessionMetrics};
use crate::types::{ExperimentConfig, FeatureVector, LabeledFeature, Strategy};

// ---------------------------------------------------------------------------
// Feature files
// ---------------------------------------------------------------------------

/// Serializes a labeled feature set. Rejects an empty set and ragged
/// dimensions.
pub fn write_features(path: &Path, samples: &[LabeledFeature]) -> Result<()> {
    fs::write(path, features_to_string(samples)?)?;
    Ok(())
}

pub fn features_to_string(samples: &[LabeledFeature]) -> Result<String> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    let dim = samples[0].vector.dim();
    let mut class_ids: Vec<usize> = samples.iter().map(|s| s.class_id).collect();
    class_ids.sort_unstable();
    class_ids.dedup();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "dim={dim},classes={},samples={}",
        class_ids.len(),
        samples.len()
    );
    for s in samples {
        if s.vector.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: s.vector.dim(),
            });
        }
        let _ = write!(out, "{}", s.class_id);
        for c in s.vector.components() {
            let _ = write!(out, ",{c:?}");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn read_features(path: &Path) -> Result<Vec<LabeledFeature>> {
    features_from_string(&fs::read_to_string(path)?)
}

pub fn features_from_string(content: &str) -> Result<Vec<LabeledFeature>> {
    let mut lines = content.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::EmptyInput("feature file"))?;
    let (dim, classes, declared) = parse_feature_header(header)?;

    let mut samples = Vec::with_capacity(declared);
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let class_cell = cells.next().unwrap_or("");
        let class_id: usize = class_cell.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid class id {class_cell:?}"),
        })?;
        let mut components = Vec::with_capacity(dim);
        for cell in cells {
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("non-numeric cell {cell:?}"),
            })?;
            components.push(value);
        }
        if components.len() != dim {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {dim} components, got {}", components.len()),
            });
        }
        let vector = FeatureVector::new(components).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        samples.push(LabeledFeature::new(vector, class_id));
    }

    if samples.len() != declared {
        return Err(Error::Parse {
            line: 1,
            message: format!("header declares {declared} samples, file has {}", samples.len()),
        });
    }
    let mut distinct: Vec<usize> = samples.iter().map(|s| s.class_id).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != classes {
        return Err(Error::Parse {
            line: 1,
            message: format!("header declares {classes} classes, file has {}", distinct.len()),
        });
    }
    Ok(samples)
}

fn parse_feature_header(header: &str) -> Result<(usize, usize, usize)> {
    let bad = |message: String| Error::Parse { line: 1, message };
    let mut dim = None;
    let mut classes = None;
    let mut samples = None;
    for part in header.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed header field {part:?}")))?;
        let value: usize = value
            .parse()
            .map_err(|_| bad(format!("invalid header value {value:?}")))?;
        match key {
            "dim" => dim = Some(value),
            "classes" => classes = Some(value),
            "samples" => samples = Some(value),
            other => return Err(bad(format!("unknown header field {other:?}"))),
        }
    }
    match (dim, classes, samples) {
        (Some(d), Some(c), Some(n)) if d > 0 && c > 0 && n > 0 => Ok((d, c, n)),
        (Some(_), Some(_), Some(_)) => Err(bad("header counts must be positive".into())),
        _ => Err(bad("header must declare dim, classes, samples".into())),
    }
}

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

const CONFIG_KEYS: [&str; 20] = [
    "dim",
    "base_class_count",
    "base_samples_per_class",
    "ways",
    "shots",
    "session_count",
    "unlabeled_count",
    "base_to_novel_ratio",
    "m",
    "alpha",
    "k_base",
    "generated_per_class",
    "strategy",
    "static_threshold",
    "seed",
    "test_per_class",
    "separation_radius",
    "novel_correlation",
    "include_ambiguous_in_stats",
    "update_base_weights",
];

fn config_value(config: &ExperimentConfig, key: &str) -> String {
    match key {
        "dim" => config.dim.to_string(),
        "base_class_count" => config.base_class_count.to_string(),
        "base_samples_per_class" => config.base_samples_per_class.to_string(),
        "ways" => config.ways.to_string(),
        "shots" => config.shots.to_string(),
        "session_count" => config.session_count.to_string(),
        "unlabeled_count" => config.unlabeled_count.to_string(),
        "base_to_novel_ratio" => format!("{:?}", config.base_to_novel_ratio),
        "m" => format!("{:?}", config.m),
        "alpha" => format!("{:?}", config.alpha),
        "k_base" => config.k_base.to_string(),
        "generated_per_class" => config.generated_per_class.to_string(),
        "strategy" => config.strategy.as_str().to_string(),
        "static_threshold" => format!("{:?}", config.static_threshold),
        "seed" => config.seed.to_string(),
        "test_per_class" => config.test_per_class.to_string(),
        "separation_radius" => format!("{:?}", config.separation_radius),
        "novel_correlation" => format!("{:?}", config.novel_correlation),
        "include_ambiguous_in_stats" => config.include_ambiguous_in_stats.to_string(),
        "update_base_weights" => config.update_base_weights.to_string(),
        _ => unreachable!("unknown config key {key}"),
    }
}

fn apply_config_value(
    config: &mut ExperimentConfig,
    key: &str,
    value: &str,
    line: usize,
) -> Result<()> {
    fn parse<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
        value.parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid value for {key}: {value:?}"),
        })
    }
    match key {
        "dim" => config.dim = parse(key, value, line)?,
        "base_class_count" => config.base_class_count = parse(key, value, line)?,
        "base_samples_per_class" => config.base_samples_per_class = parse(key, value, line)?,
        "ways" => config.ways = parse(key, value, line)?,
        "shots" => config.shots = parse(key, value, line)?,
        "session_count" => config.session_count = parse(key, value, line)?,
        "unlabeled_count" => config.unlabeled_count = parse(key, value, line)?,
        "base_to_novel_ratio" => config.base_to_novel_ratio = parse(key, value, line)?,
        "m" => config.m = parse(key, value, line)?,
        "alpha" => config.alpha = parse(key, value, line)?,
        "k_base" => config.k_base = parse(key, value, line)?,
        "generated_per_class" => config.generated_per_class = parse(key, value, line)?,
        "strategy" => {
            config.strategy = Strategy::from_str(value).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?
        }
        "static_threshold" => config.static_threshold = parse(key, value, line)?,
        "seed" => config.seed = parse(key, value, line)?,
        "test_per_class" => config.test_per_class = parse(key, value, line)?,
        "separation_radius" => config.separation_radius = parse(key, value, line)?,
        "novel_correlation" => config.novel_correlation = parse(key, value, line)?,
        "include_ambiguous_in_stats" => {
            config.include_ambiguous_in_stats = parse(key, value, line)?
        }
        "update_base_weights" => config.update_base_weights = parse(key, value, line)?,
        other => return Err(Error::UnknownKey(other.to_string())),
    }
    Ok(())
}

pub fn config_to_string(config: &ExperimentConfig) -> String {
    let mut out = String::new();
    for key in CONFIG_KEYS {
        let _ = writeln!(out, "{key}={}", config_value(config, key));
    }
    out
}

pub fn write_config(path: &Path, config: &ExperimentConfig) -> Result<()> {
    fs::write(path, config_to_string(config))?;
    Ok(())
}

/// Parses `key=value` lines. Every config key is required exactly once;
/// blank lines and `#` comments are skipped. The result is validated.
pub fn config_from_lines<'a, I>(lines: I) -> Result<ExperimentConfig>
where
    I: IntoIterator<Item = (usize, &'a str)>,
{
    let mut config = ExperimentConfig::default();
    let mut seen: Vec<&str> = Vec::new();
    for (line_no, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected key=value, got {line:?}"),
        })?;
        let key = key.trim();
        let known = CONFIG_KEYS
            .iter()
            .find(|&&k| k == key)
            .ok_or_else(|| Error::UnknownKey(key.to_string()))?;
        if seen.contains(known) {
            return Err(Error::DuplicateKey(key.to_string()));
        }
        seen.push(known);
        apply_config_value(&mut config, key, value.trim(), line_no)?;
    }
    for key in CONFIG_KEYS {
        if !seen.contains(&key) {
            return Err(Error::MissingKey(key.to_string()));
        }
    }
    config.validate()?;
    Ok(config)
}

pub fn config_from_string(content: &str) -> Result<ExperimentConfig> {
    config_from_lines(content.lines().enumerate().map(|(i, l)| (i + 1, l)))
}

pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    config_from_string(&fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

fn fmt_percent(value: f64) -> String {
    format!("{value:.2}")
}

fn fmt_opt_percent(value: Option<f64>) -> String {
    value.map_or_else(|| "-".to_string(), fmt_percent)
}

fn fmt_opt_full(value: Option<f64>) -> String {
    value.map_or_else(|| "-".to_string(), |v| format!("{v:?}"))
}

pub fn reports_to_string(reports: &[RunReport]) -> Result<String> {
    if reports.is_empty() {
        return Err(Error::EmptyInput("report list"));
    }
    let session_count = reports[0].sessions.len();
    for r in reports {
        if r.sessions.len() != session_count {
            return Err(Error::DimensionMismatch {
                expected: session_count,
                actual: r.sessions.len(),
            });
        }
    }
    let mut labels: Vec<&str> = reports.iter().map(|r| r.label.as_str()).collect();
    labels.sort_unstable();
    labels.dedup();
    if labels.len() != reports.len() {
        return Err(Error::DuplicateKey("report row label".to_string()));
    }

    let mut out = String::new();
    out.push_str("run");
    for t in 0..session_count {
        let _ = write!(out, ",s{t}");
    }
    out.push_str(",avg\n");
    for r in reports {
        let _ = write!(out, "{}", r.label);
        for s in &r.sessions {
            let _ = write!(out, ",{}", fmt_percent(s.acc_all));
        }
        let _ = writeln!(out, ",{:?}", r.avg_all);
    }
    for r in reports {
        let _ = writeln!(out, "[config {}]", r.label);
        out.push_str(&config_to_string(&r.config));
        for s in &r.sessions {
            let _ = writeln!(out, "[session {} {}]", r.label, s.session_index);
            let _ = writeln!(out, "acc_all={}", fmt_percent(s.acc_all));
            let _ = writeln!(out, "acc_base={}", fmt_opt_percent(s.acc_base));
            let _ = writeln!(out, "acc_novel={}", fmt_opt_percent(s.acc_novel));
            let _ = writeln!(out, "pseudo_precision={}", fmt_opt_full(s.pseudo_precision));
            let _ = writeln!(out, "n_confident={}", s.n_confident);
            let _ = writeln!(out, "n_ambiguous={}", s.n_ambiguous);
            let _ = writeln!(out, "n_generated={}", s.n_generated);
            let _ = writeln!(out, "tau_used={:?}", s.tau_used);
        }
    }
    Ok(out)
}

/// Writes one run; the multi-run layout is shared with ablations and sweeps.
pub fn write_report(path: &Path, report: &RunReport) -> Result<()> {
    write_reports(path, std::slice::from_ref(report))
}

pub fn write_reports(path: &Path, reports: &[RunReport]) -> Result<()> {
    fs::write(path, reports_to_string(reports)?)?;
    Ok(())
}

pub fn read_report(path: &Path) -> Result<Vec<RunReport>> {
    reports_from_string(&fs::read_to_string(path)?)
}

pub fn reports_from_string(content: &str) -> Result<Vec<RunReport>> {
    let lines: Vec<(usize, &str)> = content
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .collect();
    let mut iter = lines.iter().peekable();

    let (_, header) = iter.next().ok_or(Error::EmptyInput("report file"))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.first() != Some(&"run") || columns.last() != Some(&"avg") || columns.len() < 3 {
        return Err(Error::Parse {
            line: 1,
            message: "expected header run,s0,...,avg".to_string(),
        });
    }
    let session_count = columns.len() - 2;

    // Table rows: label, per-session accuracy, average.
    let mut rows: Vec<(String, Vec<f64>, f64)> = Vec::new();
    while let Some((_, line)) = iter.peek() {
        if line.starts_with('[') {
            break;
        }
        let (line_no, line) = iter.next().unwrap();
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != columns.len() {
            return Err(Error::Parse {
                line: *line_no,
                message: format!("expected {} cells, got {}", columns.len(), cells.len()),
            });
        }
        let parse_cell = |cell: &str| -> Result<f64> {
            cell.parse().map_err(|_| Error::Parse {
                line: *line_no,
                message: format!("non-numeric cell {cell:?}"),
            })
        };
        let accs = cells[1..=session_count]
            .iter()
            .map(|c| parse_cell(c))
            .collect::<Result<Vec<f64>>>()?;
        let avg = parse_cell(cells[columns.len() - 1])?;
        rows.push((cells[0].to_string(), accs, avg));
    }

    // Sections: config and session blocks keyed by row label.
    let mut configs: Vec<(String, ExperimentConfig)> = Vec::new();
    let mut sessions: Vec<(String, SessionMetrics)> = Vec::new();
    while let Some((line_no, line)) = iter.next() {
        let inner = line
            .strip_prefix('[')
            .and_then(|l| l.strip_suffix(']'))
            .ok_or_else(|| Error::Parse {
                line: *line_no,
                message: format!("expected section header, got {line:?}"),
            })?;
        let parts: Vec<&str> = inner.split(' ').collect();
        let mut block: Vec<(usize, &str)> = Vec::new();
        while let Some((_, next)) = iter.peek() {
            if next.starts_with('[') {
                break;
            }
            let (n, l) = iter.next().unwrap();
            block.push((*n, l));
        }
        match parts.as_slice() {
            ["config", label] => {
                configs.push(((*label).to_string(), config_from_lines(block)?));
            }
            ["session", label, index] => {
                let session_index: usize = index.parse().map_err(|_| Error::Parse {
                    line: *line_no,
                    message: format!("invalid session index {index:?}"),
                })?;
                sessions.push((
                    (*label).to_string(),
                    session_metrics_from_lines(session_index, &block)?,
                ));
            }
            _ => {
                return Err(Error::Parse {
                    line: *line_no,
                    message: format!("unknown section {inner:?}"),
                })
            }
        }
    }

    rows.into_iter()
        .map(|(label, _accs, avg)| {
            let config = configs
                .iter()
                .find(|(l, _)| *l == label)
                .map(|(_, c)| c.clone())
                .ok_or_else(|| Error::MissingKey(format!("config block for {label}")))?;
            let mut run_sessions: Vec<SessionMetrics> = sessions
                .iter()
                .filter(|(l, _)| *l == label)
                .map(|(_, s)| s.clone())
                .collect();
            run_sessions.sort_by_key(|s| s.session_index);
            if run_sessions.len() != session_count {
                return Err(Error::MissingKey(format!("session blocks for {label}")));
            }
            Ok(RunReport {
                label,
                config,
                sessions: run_sessions,
                avg_all: avg,
            })
        })
        .collect()
}

fn session_metrics_from_lines(
    session_index: usize,
    block: &[(usize, &str)],
) -> Result<SessionMetrics> {
    let get = |wanted: &str| -> Result<(usize, String)> {
        for (line_no, line) in block {
            if let Some((key, value)) = line.split_once('=') {
                if key == wanted {
                    return Ok((*line_no, value.to_string()));
                }
            }
        }
        Err(Error::MissingKey(wanted.to_string()))
    };
    fn number(pair: (usize, String)) -> Result<f64> {
        pair.1.parse().map_err(|_| Error::Parse {
            line: pair.0,
            message: format!("non-numeric value {:?}", pair.1),
        })
    }
    fn opt_number(pair: (usize, String)) -> Result<Option<f64>> {
        if pair.1 == "-" {
            Ok(None)
        } else {
            number(pair).map(Some)
        }
    }
    fn count(pair: (usize, String)) -> Result<usize> {
        pair.1.parse().map_err(|_| Error::Parse {
            line: pair.0,
            message: format!("invalid count {:?}", pair.1),
        })
    }
    Ok(SessionMetrics {
        session_index,
        acc_all: number(get("acc_all")?)?,
        acc_base: opt_number(get("acc_base")?)?,
        acc_novel: opt_number(get("acc_novel")?)?,
        pseudo_precision: opt_number(get("pseudo_precision")?)?,
        n_confident: count(get("n_confident")?)?,
        n_ambiguous: count(get("n_ambiguous")?)?,
        n_generated: count(get("n_generated")?)?,
        tau_used: number(get("tau_used")?)?,
    })
}
