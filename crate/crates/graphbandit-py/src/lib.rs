//! Python bindings: feedback graphs with their exact oracles, the two
//! learners, and the experiment harness.
//!
//! Build with `cargo build --release -p graphbandit-py`; the resulting
//! `libgraphbandit_py.so` imports as `graphbandit_py` once renamed (see
//! `python/smoke_test.py` for a loader that does this automatically).

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use graphbandit::env::{generate_graph, GraphFamily};
use graphbandit::explore;
use graphbandit::harness::{run_experiment_to_dir, ExperimentSpec};
use graphbandit::learner::{Exp3Baseline, Learner, LearnerConfig, Policy, StepOutcome};
use graphbandit::verify::{self, VerifyLevel};

fn to_py_err(err: graphbandit::Error) -> PyErr {
    match &err {
        graphbandit::Error::Io { .. } => PyIOError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

/// Directed feedback graph with self-loops.
#[pyclass(name = "FeedbackGraph", module = "graphbandit_py", skip_from_py_object)]
#[derive(Clone)]
struct PyFeedbackGraph {
    inner: graphbandit::FeedbackGraph,
}

#[pymethods]
impl PyFeedbackGraph {
    /// Parses the edge-list text format or the JSON form.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyFeedbackGraph {
            inner: graphbandit::FeedbackGraph::from_text(text).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    fn from_file(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(PyFeedbackGraph {
            inner: graphbandit::FeedbackGraph::from_path(&path).map_err(to_py_err)?,
        })
    }

    /// Builds a graph from `(u, v)` edge pairs, adding missing self-loops.
    #[staticmethod]
    fn from_edges(num_arms: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyFeedbackGraph {
            inner: graphbandit::FeedbackGraph::new(num_arms, &edges).map_err(to_py_err)?,
        })
    }

    /// Generates a named family, e.g.
    /// `{"family": "cliques", "num_cliques": 2, "clique_size": 5}`.
    #[staticmethod]
    #[pyo3(signature = (family_json, seed = 0))]
    fn generate(family_json: &str, seed: u64) -> PyResult<Self> {
        let family: GraphFamily = serde_json::from_str(family_json)
            .map_err(|e| PyValueError::new_err(format!("bad family spec: {e}")))?;
        Ok(PyFeedbackGraph {
            inner: generate_graph(&family, seed).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn num_arms(&self) -> usize {
        self.inner.num_arms()
    }

    fn out_neighbors(&self, arm: usize) -> PyResult<Vec<usize>> {
        if arm >= self.inner.num_arms() {
            return Err(PyValueError::new_err(format!("arm {arm} out of range")));
        }
        Ok(self.inner.out_neighbors(arm).to_vec())
    }

    fn in_neighbors(&self, arm: usize) -> PyResult<Vec<usize>> {
        if arm >= self.inner.num_arms() {
            return Err(PyValueError::new_err(format!("arm {arm} out of range")));
        }
        Ok(self.inner.in_neighbors(arm).to_vec())
    }

    fn has_edge(&self, from: usize, to: usize) -> bool {
        self.inner.has_edge(from, to)
    }

    fn is_undirected(&self) -> bool {
        self.inner.is_undirected()
    }

    #[pyo3(signature = (ignore_directions = true))]
    fn independence_number(&self, ignore_directions: bool) -> PyResult<usize> {
        self.inner
            .independence_number(ignore_directions)
            .map_err(to_py_err)
    }

    fn strong_independence_number(&self) -> PyResult<usize> {
        self.inner.strong_independence_number().map_err(to_py_err)
    }

    fn mas(&self) -> PyResult<usize> {
        self.inner.mas().map_err(to_py_err)
    }

    fn is_dominating(&self, arms: Vec<usize>) -> bool {
        self.inner.is_dominating(&arms)
    }

    fn strong_subgraph(&self) -> Self {
        PyFeedbackGraph {
            inner: self.inner.strong_subgraph(),
        }
    }

    /// Oracle statistics as a dict.
    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let stats = self.inner.stats().map_err(to_py_err)?;
        let dict = PyDict::new(py);
        dict.set_item("num_arms", stats.num_arms)?;
        dict.set_item("alpha", stats.alpha)?;
        dict.set_item("alpha_strong", stats.alpha_strong)?;
        dict.set_item("mas", stats.mas)?;
        dict.set_item("is_undirected", stats.is_undirected)?;
        Ok(dict)
    }

    fn to_edge_list(&self) -> String {
        self.inner.to_edge_list_text()
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "FeedbackGraph(num_arms={}, edges={})",
            self.inner.num_arms(),
            self.inner.edges().len()
        )
    }
}

fn outcome_to_dict<'py>(py: Python<'py>, outcome: &StepOutcome) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item("round", outcome.round)?;
    dict.set_item("chosen", outcome.chosen)?;
    dict.set_item("incurred_loss", outcome.incurred_loss)?;
    dict.set_item("observed", outcome.observed.clone())?;
    if let Some(detail) = &outcome.detail {
        dict.set_item("probs", detail.probs.clone())?;
        dict.set_item("weights", detail.weights.clone())?;
        dict.set_item("epsilon", detail.epsilon.clone())?;
        dict.set_item("exploration_set", detail.exploration_set.clone())?;
        dict.set_item("gap_estimates", detail.snapshot.delta_hat.clone())?;
        dict.set_item("ucb", detail.snapshot.ucb.clone())?;
        dict.set_item("lcb", detail.snapshot.lcb.clone())?;
        dict.set_item("learning_rate", detail.learning_rate)?;
        dict.set_item("theta", detail.theta)?;
    }
    Ok(dict)
}

/// The graph-aware exponential-weights learner.
///
/// The caller passes the full loss vector each round and acts as the
/// environment; only the out-neighborhood of the sampled arm reaches the
/// learner's statistics.
#[pyclass(name = "Learner", module = "graphbandit_py")]
struct PyLearner {
    inner: Learner,
    graph: graphbandit::FeedbackGraph,
}

#[pymethods]
impl PyLearner {
    /// `alpha_tilde` defaults to the exact oracle value; `lambda_` defaults
    /// to `alpha_tilde` (fixed graph) or 1 (time-varying).
    #[new]
    #[pyo3(signature = (graph, seed = 0, gamma = 4.0, beta = 320.0, lambda_ = None,
                        alpha_tilde = None, time_varying = false, force_rebuild_set = false))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        graph: &PyFeedbackGraph,
        seed: u64,
        gamma: f64,
        beta: f64,
        lambda_: Option<f64>,
        alpha_tilde: Option<usize>,
        time_varying: bool,
        force_rebuild_set: bool,
    ) -> PyResult<Self> {
        let mut cfg = if time_varying {
            LearnerConfig::time_varying(seed)
        } else {
            let alpha_tilde = match alpha_tilde {
                Some(a) => a,
                None => graph
                    .inner
                    .strong_independence_number()
                    .map_err(to_py_err)?,
            };
            LearnerConfig::fixed_graph(alpha_tilde, seed)
        };
        cfg.gamma = gamma;
        cfg.beta = beta;
        if let Some(l) = lambda_ {
            cfg.lambda = l;
        }
        cfg.force_rebuild_set = force_rebuild_set;
        Ok(PyLearner {
            inner: Learner::new(graph.inner.num_arms(), cfg).map_err(to_py_err)?,
            graph: graph.inner.clone(),
        })
    }

    /// Plays one round against the stored graph.
    fn step<'py>(&mut self, py: Python<'py>, losses: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
        self.step_inner(py, None, losses)
    }

    /// Plays one round against an explicit graph (time-varying schedules).
    fn step_with_graph<'py>(
        &mut self,
        py: Python<'py>,
        graph: &PyFeedbackGraph,
        losses: Vec<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        self.step_inner(py, Some(&graph.inner), losses)
    }

    #[getter]
    fn round(&self) -> u64 {
        self.inner.round()
    }

    #[getter]
    fn num_arms(&self) -> usize {
        self.inner.num_arms()
    }
}

impl PyLearner {
    fn step_inner<'py>(
        &mut self,
        py: Python<'py>,
        graph: Option<&graphbandit::FeedbackGraph>,
        losses: Vec<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let graph = graph.unwrap_or(&self.graph);
        if losses.len() != graph.num_arms() {
            return Err(PyValueError::new_err(format!(
                "expected {} losses, got {}",
                graph.num_arms(),
                losses.len()
            )));
        }
        let outcome = self
            .inner
            .step(graph, &mut |arm| losses[arm])
            .map_err(to_py_err)?;
        outcome_to_dict(py, &outcome)
    }
}

/// Bandit-feedback EXP3 baseline.
#[pyclass(name = "Exp3Baseline", module = "graphbandit_py")]
struct PyExp3Baseline {
    inner: Exp3Baseline,
    graph: graphbandit::FeedbackGraph,
}

#[pymethods]
impl PyExp3Baseline {
    #[new]
    #[pyo3(signature = (num_arms, seed = 0))]
    fn new(num_arms: usize, seed: u64) -> PyResult<Self> {
        Ok(PyExp3Baseline {
            inner: Exp3Baseline::new(num_arms, seed).map_err(to_py_err)?,
            graph: graphbandit::FeedbackGraph::new(num_arms, &[]).map_err(to_py_err)?,
        })
    }

    fn step<'py>(&mut self, py: Python<'py>, losses: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
        if losses.len() != self.graph.num_arms() {
            return Err(PyValueError::new_err(format!(
                "expected {} losses, got {}",
                self.graph.num_arms(),
                losses.len()
            )));
        }
        let outcome = self
            .inner
            .step(&self.graph, &mut |arm| losses[arm])
            .map_err(to_py_err)?;
        outcome_to_dict(py, &outcome)
    }

    fn distribution(&self) -> Vec<f64> {
        self.inner.distribution()
    }

    #[getter]
    fn round(&self) -> u64 {
        self.inner.round()
    }
}

/// Greedy exploration set for the given gap estimates: dominating, strongly
/// independent, ascending-gap pick order.
#[pyfunction]
fn build_exploration_set(graph: &PyFeedbackGraph, gap_estimates: Vec<f64>) -> PyResult<Vec<usize>> {
    if gap_estimates.len() != graph.inner.num_arms() {
        return Err(PyValueError::new_err(format!(
            "expected {} gap estimates, got {}",
            graph.inner.num_arms(),
            gap_estimates.len()
        )));
    }
    Ok(explore::build_exploration_set(&graph.inner, &gap_estimates))
}

/// Runs a JSON experiment spec and writes traces into `output_dir`.
/// Returns `{learner: final mean regret}`.
#[pyfunction]
#[pyo3(signature = (spec_json, output_dir, threads = None))]
fn run_experiment<'py>(
    py: Python<'py>,
    spec_json: &str,
    output_dir: std::path::PathBuf,
    threads: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = ExperimentSpec::from_json_str(spec_json).map_err(to_py_err)?;
    let result = run_experiment_to_dir(&spec, &output_dir, threads).map_err(to_py_err)?;
    let dict = PyDict::new(py);
    for learner in &result.learners {
        dict.set_item(&learner.name, learner.final_mean_regret())?;
    }
    Ok(dict)
}

/// Runs the property-check suites; returns a list of
/// `{"name", "passed", "detail"}` dicts.
#[pyfunction]
#[pyo3(signature = (level = "fast", seed = 7))]
fn run_verify<'py>(py: Python<'py>, level: &str, seed: u64) -> PyResult<Bound<'py, PyList>> {
    let level: VerifyLevel = level
        .parse()
        .map_err(|e: String| PyValueError::new_err(e))?;
    let results = verify::run(level, seed);
    let list = PyList::empty(py);
    for check in results {
        let dict = PyDict::new(py);
        dict.set_item("name", check.name)?;
        dict.set_item("passed", check.passed)?;
        dict.set_item("detail", check.detail)?;
        list.append(dict)?;
    }
    Ok(list)
}

#[pymodule]
fn graphbandit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFeedbackGraph>()?;
    m.add_class::<PyLearner>()?;
    m.add_class::<PyExp3Baseline>()?;
    m.add_function(wrap_pyfunction!(build_exploration_set, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
