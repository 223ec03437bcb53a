//! Python bindings: catalogs, live processes, trajectories and girth checks.
//!
//! ```python
//! import hgtp
//! cat = hgtp.Catalog(6)
//! p = hgtp.Process(200, 6, seed=1, catalog=cat)
//! m = p.run_to_end()
//! assert hgtp.girth_ok(p.chosen_triples(), cat)
//! ```

use std::path::PathBuf;
use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hgtp_core::catalog::ObstructionCatalog;
use hgtp_core::engine::DEFAULT_MAX_BYTES;
use hgtp_core::experiments::{run_trial as core_run_trial, RunConfig};
use hgtp_core::observables::{self, SampleCounts};
use hgtp_core::trajectories;
use hgtp_core::{enumerate_obstructions, ProcessState, StepOutcome, Triple};

fn err(e: hgtp_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Catalog", frozen)]
struct PyCatalog {
    inner: Arc<ObstructionCatalog>,
}

#[pymethods]
impl PyCatalog {
    /// Enumerates the minimal forbidden configurations on 4..=ell vertices.
    #[new]
    fn new(ell: usize) -> PyResult<Self> {
        Ok(PyCatalog {
            inner: Arc::new(enumerate_obstructions(ell).map_err(err)?),
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyCatalog {
            inner: Arc::new(ObstructionCatalog::read_json(&path).map_err(err)?),
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.write_json(&path).map_err(err)
    }

    #[getter]
    fn ell(&self) -> usize {
        self.inner.ell
    }

    /// `(v, triples, aut, key)` for every class, diamond first.
    fn members(&self) -> Vec<(usize, Vec<[u8; 3]>, u64, String)> {
        self.inner
            .all_members
            .iter()
            .map(|f| (f.vertex_count, f.triples.clone(), f.aut_count, f.key_hex()))
            .collect()
    }

    /// Keys of the members on at least six vertices.
    fn large_keys(&self) -> Vec<String> {
        self.inner.large_members.iter().map(|f| f.key_hex()).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.all_members.len()
    }

    fn __repr__(&self) -> String {
        format!("Catalog(ell={}, classes={})", self.inner.ell, self.inner.all_members.len())
    }
}

fn catalog_or_new(catalog: Option<&PyCatalog>, ell: usize) -> PyResult<Arc<ObstructionCatalog>> {
    match catalog {
        Some(c) if c.inner.ell != ell => Err(PyValueError::new_err(format!(
            "catalog is for ell = {}, got ell = {ell}",
            c.inner.ell
        ))),
        Some(c) => Ok(Arc::clone(&c.inner)),
        None => Ok(Arc::new(enumerate_obstructions(ell).map_err(err)?)),
    }
}

/// A running high-girth triple process.
#[pyclass(name = "Process")]
struct PyProcess {
    state: ProcessState,
}

#[pymethods]
impl PyProcess {
    #[new]
    #[pyo3(signature = (n, ell, seed = 0, catalog = None, max_bytes = DEFAULT_MAX_BYTES))]
    fn new(n: usize, ell: usize, seed: u64, catalog: Option<PyRef<'_, PyCatalog>>, max_bytes: u64) -> PyResult<Self> {
        let cat = catalog_or_new(catalog.as_deref(), ell)?;
        Ok(PyProcess {
            state: ProcessState::with_catalog(n, cat, seed, max_bytes).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.state.n()
    }

    #[getter]
    fn ell(&self) -> usize {
        self.state.ell()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.state.seed()
    }

    #[getter]
    fn step_index(&self) -> usize {
        self.state.step_index()
    }

    /// `i / n^2`.
    #[getter]
    fn time(&self) -> f64 {
        self.state.time()
    }

    #[getter]
    fn available_count(&self) -> usize {
        self.state.available_len()
    }

    #[getter]
    fn terminated(&self) -> bool {
        self.state.is_terminated()
    }

    /// Adds one random available triple; `None` once nothing is available.
    fn step(&mut self) -> Option<Triple> {
        match self.state.step() {
            StepOutcome::Chosen(code) => Some(code.decode()),
            StepOutcome::Terminated { .. } => None,
        }
    }

    fn force_step(&mut self, triple: Triple) -> PyResult<()> {
        self.state.force_step(triple).map(|_| ()).map_err(err)
    }

    /// Steps until `step_index == i` or termination.
    fn run_until(&mut self, i: usize) -> usize {
        while self.state.step_index() < i {
            if let StepOutcome::Terminated { .. } = self.state.step() {
                break;
            }
        }
        self.state.step_index()
    }

    /// Runs to termination and returns the number of triples chosen.
    fn run_to_end(&mut self) -> usize {
        self.state.run_to_end()
    }

    fn chosen_triples(&self) -> Vec<Triple> {
        self.state.chosen_triples().to_vec()
    }

    fn is_available(&self, triple: Triple) -> bool {
        self.state.is_available(triple)
    }

    fn alive_pair_count(&self) -> usize {
        self.state.alive_pair_count()
    }

    /// Number of available triples through the uncovered pair `uv`.
    fn codegree(&self, u: u32, v: u32) -> PyResult<u32> {
        observables::codegree_y(&self.state, u, v).map_err(err)
    }

    /// Copies of the configuration `key` through the available triple with
    /// `k` triples already chosen.
    fn count_w(&self, triple: Triple, key: &str, k: usize) -> PyResult<u64> {
        let f = self
            .state
            .catalog()
            .large_members
            .iter()
            .find(|f| f.key_hex() == key)
            .ok_or_else(|| PyValueError::new_err(format!("no configuration with key {key}")))?;
        observables::count_w(&self.state, triple, f, k).map_err(err)
    }

    /// Triples that adding `triple` would make unavailable.
    fn closing_triples(&self, triple: Triple) -> Vec<Triple> {
        self.state
            .find_closing_triples(triple)
            .into_iter()
            .map(|c| c.decode())
            .collect()
    }

    fn check_invariants(&self) -> PyResult<()> {
        self.state.check_invariants().map_err(PyRuntimeError::new_err)
    }

    /// Samples the observables and returns the snapshot as JSON.
    #[pyo3(signature = (pairs = 200, triples = 50, seed = 0))]
    fn snapshot_json(&self, pairs: usize, triples: usize, seed: u64) -> PyResult<String> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let snap = observables::take_snapshot(&self.state, SampleCounts { pairs, triples }, &mut rng).map_err(err)?;
        serde_json::to_string(&snap).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Process(n={}, ell={}, seed={}, i={}, available={})",
            self.state.n(),
            self.state.ell(),
            self.state.seed(),
            self.state.step_index(),
            self.state.available_len()
        )
    }
}

/// Predicted trajectories at `t`: a dict with `t, p, q, q_tilde, q_hat,
/// y_hat` and `w_hat` keyed by `(key, k)`.
#[pyfunction]
fn trajectory<'py>(py: Python<'py>, t: f64, n: usize, catalog: &PyCatalog) -> PyResult<Bound<'py, PyDict>> {
    let pt = trajectories::evaluate(t, n, &catalog.inner).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("t", pt.t)?;
    d.set_item("p", pt.p)?;
    d.set_item("q", pt.q)?;
    d.set_item("q_tilde", pt.q_tilde)?;
    d.set_item("q_hat", pt.q_hat)?;
    d.set_item("y_hat", pt.y_hat)?;
    let w = PyDict::new(py);
    for wh in &pt.w_hat {
        w.set_item((wh.key.as_str(), wh.k), wh.value)?;
    }
    d.set_item("w_hat", w)?;
    Ok(d)
}

/// `(log N1, log N2, log N1 - log N2)`.
#[pyfunction]
fn counting_estimate(n: usize, catalog: &PyCatalog) -> (f64, f64, f64) {
    let c = trajectories::counting_estimate(n, &catalog.inner);
    (c.log_n1, c.log_n2, c.log_ratio)
}

/// No copy of any catalog member.
#[pyfunction]
fn girth_ok(triples: Vec<Triple>, catalog: &PyCatalog) -> PyResult<bool> {
    observables::girth_check_patterns(&triples, &catalog.inner).map_err(err)
}

/// No `g <= ell` vertices spanning `g - 2` triples, by subset search.
#[pyfunction]
fn girth_ok_subsets(triples: Vec<Triple>, ell: usize) -> PyResult<bool> {
    observables::girth_check_subsets(&triples, ell).map_err(err)
}

/// No pair lies in two triples.
#[pyfunction]
fn partial_sts_ok(triples: Vec<Triple>) -> bool {
    observables::partial_sts_violation(&triples).is_none()
}

/// Runs one seed with the default snapshot grid; returns the record as JSON.
#[pyfunction]
#[pyo3(signature = (n, ell, seed = 0, snapshot_every = 0, catalog = None))]
fn run_trial(
    py: Python<'_>,
    n: usize,
    ell: usize,
    seed: u64,
    snapshot_every: usize,
    catalog: Option<PyRef<'_, PyCatalog>>,
) -> PyResult<String> {
    let cat = catalog_or_new(catalog.as_deref(), ell)?;
    let config = RunConfig {
        n,
        ell,
        seed,
        snapshot_every,
        ..RunConfig::default()
    };
    let record = py.detach(|| core_run_trial(&config, cat)).map_err(err)?;
    record.to_json().map_err(err)
}

#[pymodule]
fn hgtp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyCatalog>()?;
    m.add_class::<PyProcess>()?;
    m.add_function(wrap_pyfunction!(trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(counting_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(girth_ok, m)?)?;
    m.add_function(wrap_pyfunction!(girth_ok_subsets, m)?)?;
    m.add_function(wrap_pyfunction!(partial_sts_ok, m)?)?;
    m.add_function(wrap_pyfunction!(run_trial, m)?)?;
    Ok(())
}
