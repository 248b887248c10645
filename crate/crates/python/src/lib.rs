//! Python bindings for the simulation engine.
//!
//! Exposes the experiment config, the protocol entry points
//! (`run_experiment`, `run_ablation`, `sweep`), benchmark file generation,
//! and report reading. Reports come back as thin wrapper objects whose
//! fields mirror the Rust types.

use std::path::Path;
use std::str::FromStr;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use fscil_core::dataio;
use fscil_core::datagen;
use fscil_core::protocol::{self, SweepParam};
use fscil_core::types::{ExperimentConfig as CoreConfig, LabeledFeature, Strategy};

fn to_py_err(err: fscil_core::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

const CONFIG_FIELDS: [&str; 20] = [
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

fn apply_override(config: &mut CoreConfig, key: &str, value: &Bound<'_, PyAny>) -> PyResult<()> {
    match key {
        "dim" => config.dim = value.extract()?,
        "base_class_count" => config.base_class_count = value.extract()?,
        "base_samples_per_class" => config.base_samples_per_class = value.extract()?,
        "ways" => config.ways = value.extract()?,
        "shots" => config.shots = value.extract()?,
        "session_count" => config.session_count = value.extract()?,
        "unlabeled_count" => config.unlabeled_count = value.extract()?,
        "base_to_novel_ratio" => config.base_to_novel_ratio = value.extract()?,
        "m" => config.m = value.extract()?,
        "alpha" => config.alpha = value.extract()?,
        "k_base" => config.k_base = value.extract()?,
        "generated_per_class" => config.generated_per_class = value.extract()?,
        "strategy" => {
            let name: String = value.extract()?;
            config.strategy = Strategy::from_str(&name).map_err(to_py_err)?;
        }
        "static_threshold" => config.static_threshold = value.extract()?,
        "seed" => config.seed = value.extract()?,
        "test_per_class" => config.test_per_class = value.extract()?,
        "separation_radius" => config.separation_radius = value.extract()?,
        "novel_correlation" => config.novel_correlation = value.extract()?,
        "include_ambiguous_in_stats" => config.include_ambiguous_in_stats = value.extract()?,
        "update_base_weights" => config.update_base_weights = value.extract()?,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown config field {other:?}"
            )))
        }
    }
    Ok(())
}

fn field_value<'py>(py: Python<'py>, config: &CoreConfig, key: &str) -> PyResult<Bound<'py, PyAny>> {
    let value = match key {
        "dim" => config.dim.into_pyobject(py)?.into_any(),
        "base_class_count" => config.base_class_count.into_pyobject(py)?.into_any(),
        "base_samples_per_class" => config.base_samples_per_class.into_pyobject(py)?.into_any(),
        "ways" => config.ways.into_pyobject(py)?.into_any(),
        "shots" => config.shots.into_pyobject(py)?.into_any(),
        "session_count" => config.session_count.into_pyobject(py)?.into_any(),
        "unlabeled_count" => config.unlabeled_count.into_pyobject(py)?.into_any(),
        "base_to_novel_ratio" => config.base_to_novel_ratio.into_pyobject(py)?.into_any(),
        "m" => config.m.into_pyobject(py)?.into_any(),
        "alpha" => config.alpha.into_pyobject(py)?.into_any(),
        "k_base" => config.k_base.into_pyobject(py)?.into_any(),
        "generated_per_class" => config.generated_per_class.into_pyobject(py)?.into_any(),
        "strategy" => config.strategy.as_str().into_pyobject(py)?.into_any(),
        "static_threshold" => config.static_threshold.into_pyobject(py)?.into_any(),
        "seed" => config.seed.into_pyobject(py)?.into_any(),
        "test_per_class" => config.test_per_class.into_pyobject(py)?.into_any(),
        "separation_radius" => config.separation_radius.into_pyobject(py)?.into_any(),
        "novel_correlation" => config.novel_correlation.into_pyobject(py)?.into_any(),
        "include_ambiguous_in_stats" => {
            pyo3::types::PyBool::new(py, config.include_ambiguous_in_stats)
                .to_owned()
                .into_any()
        }
        "update_base_weights" => pyo3::types::PyBool::new(py, config.update_base_weights)
            .to_owned()
            .into_any(),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown config field {other:?}"
            )))
        }
    };
    Ok(value)
}

/// Experiment configuration. Construct with keyword overrides over the
/// defaults, e.g. `ExperimentConfig(dim=16, session_count=2, seed=7)`.
#[pyclass(name = "ExperimentConfig", skip_from_py_object)]
#[derive(Clone)]
struct PyExperimentConfig {
    inner: CoreConfig,
}

#[pymethods]
impl PyExperimentConfig {
    #[new]
    #[pyo3(signature = (**overrides))]
    fn new(overrides: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut inner = CoreConfig::default();
        if let Some(overrides) = overrides {
            for (key, value) in overrides.iter() {
                let key: String = key.extract()?;
                apply_override(&mut inner, &key, &value)?;
            }
        }
        inner.validate().map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// New config with the given fields replaced.
    #[pyo3(signature = (**overrides))]
    fn replace(&self, overrides: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut inner = self.inner.clone();
        if let Some(overrides) = overrides {
            for (key, value) in overrides.iter() {
                let key: String = key.extract()?;
                apply_override(&mut inner, &key, &value)?;
            }
        }
        inner.validate().map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: dataio::read_config(Path::new(path)).map_err(to_py_err)?,
        })
    }

    fn to_file(&self, path: &str) -> PyResult<()> {
        dataio::write_config(Path::new(path), &self.inner).map_err(to_py_err)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let dict = PyDict::new(py);
        for key in CONFIG_FIELDS {
            dict.set_item(key, field_value(py, &self.inner, key)?)?;
        }
        Ok(dict)
    }

    fn __getattr__<'py>(&self, py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyAny>> {
        field_value(py, &self.inner, name).map_err(|_| {
            pyo3::exceptions::PyAttributeError::new_err(format!(
                "ExperimentConfig has no attribute {name:?}"
            ))
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "ExperimentConfig(dim={}, base_class_count={}, ways={}, shots={}, session_count={}, strategy={}, seed={})",
            self.inner.dim,
            self.inner.base_class_count,
            self.inner.ways,
            self.inner.shots,
            self.inner.session_count,
            self.inner.strategy,
            self.inner.seed
        )
    }
}

/// Metrics of one session.
#[pyclass(name = "SessionMetrics", skip_from_py_object)]
#[derive(Clone)]
struct PySessionMetrics {
    #[pyo3(get)]
    session_index: usize,
    #[pyo3(get)]
    acc_all: f64,
    #[pyo3(get)]
    acc_base: Option<f64>,
    #[pyo3(get)]
    acc_novel: Option<f64>,
    #[pyo3(get)]
    pseudo_precision: Option<f64>,
    #[pyo3(get)]
    n_confident: usize,
    #[pyo3(get)]
    n_ambiguous: usize,
    #[pyo3(get)]
    n_generated: usize,
    #[pyo3(get)]
    tau_used: f64,
}

impl From<&protocol::SessionMetrics> for PySessionMetrics {
    fn from(m: &protocol::SessionMetrics) -> Self {
        Self {
            session_index: m.session_index,
            acc_all: m.acc_all,
            acc_base: m.acc_base,
            acc_novel: m.acc_novel,
            pseudo_precision: m.pseudo_precision,
            n_confident: m.n_confident,
            n_ambiguous: m.n_ambiguous,
            n_generated: m.n_generated,
            tau_used: m.tau_used,
        }
    }
}

#[pymethods]
impl PySessionMetrics {
    fn __repr__(&self) -> String {
        format!(
            "SessionMetrics(session={}, acc_all={:.2}, confident={}, ambiguous={}, generated={})",
            self.session_index, self.acc_all, self.n_confident, self.n_ambiguous, self.n_generated
        )
    }
}

/// One full run: label, config echo, per-session metrics, and the average
/// of the report-rounded session accuracies.
#[pyclass(name = "RunReport", skip_from_py_object)]
#[derive(Clone)]
struct PyRunReport {
    inner: protocol::RunReport,
}

#[pymethods]
impl PyRunReport {
    #[getter]
    fn label(&self) -> &str {
        &self.inner.label
    }

    #[getter]
    fn avg_all(&self) -> f64 {
        self.inner.avg_all
    }

    #[getter]
    fn config(&self) -> PyExperimentConfig {
        PyExperimentConfig {
            inner: self.inner.config.clone(),
        }
    }

    #[getter]
    fn sessions(&self) -> Vec<PySessionMetrics> {
        self.inner.sessions.iter().map(PySessionMetrics::from).collect()
    }

    /// Writes this run as a report file.
    fn save(&self, path: &str) -> PyResult<()> {
        dataio::write_report(Path::new(path), &self.inner).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "RunReport(label={:?}, sessions={}, avg_all={:.2})",
            self.inner.label,
            self.inner.sessions.len(),
            self.inner.avg_all
        )
    }
}

/// Runs one experiment under the config's strategy.
#[pyfunction]
fn run_experiment(config: &PyExperimentConfig) -> PyResult<PyRunReport> {
    Ok(PyRunReport {
        inner: protocol::run_experiment(&config.inner).map_err(to_py_err)?,
    })
}

/// Runs all four strategies on the identical seed-generated benchmark.
#[pyfunction]
fn run_ablation(config: &PyExperimentConfig) -> PyResult<Vec<PyRunReport>> {
    Ok(protocol::run_ablation(&config.inner)
        .map_err(to_py_err)?
        .into_iter()
        .map(|inner| PyRunReport { inner })
        .collect())
}

/// Runs one experiment per grid value of `param` (one of unlabeled_count,
/// base_to_novel_ratio, m, alpha).
#[pyfunction]
fn sweep(config: &PyExperimentConfig, param: &str, values: Vec<f64>) -> PyResult<Vec<PyRunReport>> {
    let param = SweepParam::parse(param).map_err(to_py_err)?;
    Ok(protocol::sweep(&config.inner, param, &values)
        .map_err(to_py_err)?
        .into_iter()
        .map(|inner| PyRunReport { inner })
        .collect())
}

/// Generates the benchmark and writes per-session feature files under
/// `out_dir`. Returns the written file names.
#[pyfunction]
fn generate_benchmark_files(config: &PyExperimentConfig, out_dir: &str) -> PyResult<Vec<String>> {
    let sessions = datagen::generate_benchmark(&config.inner).map_err(to_py_err)?;
    let out = Path::new(out_dir);
    std::fs::create_dir_all(out).map_err(|e| to_py_err(e.into()))?;
    let mut written = Vec::new();
    let mut write = |name: String, samples: &[LabeledFeature]| -> PyResult<()> {
        dataio::write_features(&out.join(&name), samples).map_err(to_py_err)?;
        written.push(name);
        Ok(())
    };
    for s in &sessions {
        let t = s.session_index;
        write(format!("session_{t}_labeled.csv"), &s.labeled)?;
        if !s.unlabeled.is_empty() {
            let pool: Vec<LabeledFeature> = s
                .unlabeled
                .iter()
                .map(|p| LabeledFeature::new(p.feature.clone(), p.hidden_class))
                .collect();
            write(format!("session_{t}_unlabeled.csv"), &pool)?;
        }
        write(format!("session_{t}_test.csv"), &s.test)?;
    }
    Ok(written)
}

/// Reads a report file written by the engine or the CLI.
#[pyfunction]
fn read_report(path: &str) -> PyResult<Vec<PyRunReport>> {
    Ok(dataio::read_report(Path::new(path))
        .map_err(to_py_err)?
        .into_iter()
        .map(|inner| PyRunReport { inner })
        .collect())
}

#[pymodule]
fn fscil(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyExperimentConfig>()?;
    m.add_class::<PySessionMetrics>()?;
    m.add_class::<PyRunReport>()?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(run_ablation, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(generate_benchmark_files, m)?)?;
    m.add_function(wrap_pyfunction!(read_report, m)?)?;
    Ok(())
}
