//! Python bindings: states, channels, entropies, the checkers most often
//! used interactively, and the seeded suite runner.
//!
//! Matrices cross the boundary as nested lists of Python `complex`.
//! Verdicts come back as dicts with `name`, `kind`, `slack`, `pass`,
//! `quantities` and `meta`.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qel_core::lab::{self, Verdict};
use qel_core::{channels, entropy, states, suite, ComplexMatrix};

fn err(e: qel_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_from(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err("ragged matrix rows"));
    }
    ComplexMatrix::from_vec(n, m, rows.into_iter().flatten().collect()).map_err(err)
}

fn matrix_to(x: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..x.rows()).map(|i| (0..x.cols()).map(|j| x[(i, j)]).collect()).collect()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn verdict_dict<'py>(py: Python<'py>, v: &Verdict) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let kind = match v {
        Verdict::Check(_) => "check",
        Verdict::Chain(_) => "chain",
        Verdict::Trotter(_) => "trotter",
    };
    d.set_item("name", v.name())?;
    d.set_item("kind", kind)?;
    d.set_item("slack", v.slack())?;
    d.set_item("pass", v.pass())?;
    let q = PyDict::new(py);
    for (k, x) in v.flat_quantities() {
        q.set_item(k, x)?;
    }
    d.set_item("quantities", q)?;
    let meta = PyDict::new(py);
    meta.set_item("dims", v.meta().dims.clone())?;
    meta.set_item("seed", v.meta().seed)?;
    meta.set_item("trial", v.meta().trial)?;
    d.set_item("meta", meta)?;
    Ok(d)
}

/// Unit-trace positive semidefinite matrix.
#[pyclass(name = "DensityMatrix", module = "qel", frozen)]
struct PyDensityMatrix(states::DensityMatrix);

#[pymethods]
impl PyDensityMatrix {
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        Ok(Self(states::DensityMatrix::new(matrix_from(rows)?).map_err(err)?))
    }

    #[staticmethod]
    fn maximally_mixed(d: usize) -> Self {
        Self(states::DensityMatrix::maximally_mixed(d))
    }

    #[staticmethod]
    fn diagonal(probs: Vec<f64>) -> PyResult<Self> {
        Ok(Self(states::DensityMatrix::diagonal(&probs).map_err(err)?))
    }

    /// Random state of the given rank, seeded; `eps > 0` mixes in `eps·1/d`.
    #[staticmethod]
    #[pyo3(signature = (d, rank = None, seed = 0, eps = 0.0))]
    fn random(d: usize, rank: Option<usize>, seed: u64, eps: f64) -> PyResult<Self> {
        let rho = states::random_density(d, rank.unwrap_or(d), &mut rng(seed)).map_err(err)?;
        if eps > 0.0 {
            Ok(Self(states::regularize(&rho, eps).map_err(err)?))
        } else {
            Ok(Self(rho))
        }
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn to_list(&self) -> Vec<Vec<Complex64>> {
        matrix_to(self.0.matrix())
    }

    fn eigenvalues(&self) -> PyResult<Vec<f64>> {
        Ok(self.0.eig().map_err(err)?.eigenvalues)
    }

    fn entropy(&self) -> f64 {
        entropy::von_neumann(&self.0)
    }

    fn kron(&self, other: &Self) -> Self {
        Self(self.0.kron(&other.0))
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dim={})", self.0.dim())
    }
}

/// Density matrix on a tensor product with known subsystem dims.
#[pyclass(name = "MultipartiteState", module = "qel", frozen)]
struct PyMultipartiteState(states::MultipartiteState);

#[pymethods]
impl PyMultipartiteState {
    #[new]
    fn new(state: &PyDensityMatrix, dims: Vec<usize>) -> PyResult<Self> {
        Ok(Self(states::MultipartiteState::new(state.0.clone(), dims).map_err(err)?))
    }

    #[staticmethod]
    #[pyo3(signature = (dims, rank = None, seed = 0, eps = 1e-6))]
    fn random(dims: Vec<usize>, rank: Option<usize>, seed: u64, eps: f64) -> PyResult<Self> {
        let d: usize = dims.iter().product();
        let rho = PyDensityMatrix::random(d, rank, seed, eps)?;
        Self::new(&rho, dims)
    }

    /// Exact Markov state from a JSON spec (`{d_a, d_c, seed, eps, blocks}`).
    #[staticmethod]
    fn markov(spec_json: &str) -> PyResult<Self> {
        let spec: states::MarkovSpecJson =
            serde_json::from_str(spec_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let spec = spec.build().map_err(err)?;
        Ok(Self(states::markov_state(&spec).map_err(err)?))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let json: states::StateJson = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self(states::MultipartiteState::from_json(&json).map_err(err)?))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0.to_json()).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.0.dims().to_vec()
    }

    #[getter]
    fn state(&self) -> PyDensityMatrix {
        PyDensityMatrix(self.0.state().clone())
    }

    fn marginal(&self, keep: Vec<usize>) -> PyResult<PyDensityMatrix> {
        Ok(PyDensityMatrix(self.0.marginal(&keep).map_err(err)?))
    }

    fn __repr__(&self) -> String {
        format!("MultipartiteState(dims={:?})", self.0.dims())
    }
}

/// Trace-preserving map in Kraus form.
#[pyclass(name = "KrausChannel", module = "qel", frozen)]
struct PyKrausChannel(channels::KrausChannel);

#[pymethods]
impl PyKrausChannel {
    #[new]
    fn new(kraus: Vec<Vec<Vec<Complex64>>>) -> PyResult<Self> {
        let ops = kraus.into_iter().map(matrix_from).collect::<PyResult<Vec<_>>>()?;
        Ok(Self(channels::KrausChannel::new(ops).map_err(err)?))
    }

    #[staticmethod]
    fn identity(d: usize) -> Self {
        Self(channels::KrausChannel::identity(d))
    }

    #[staticmethod]
    fn completely_depolarizing(d: usize) -> Self {
        Self(channels::KrausChannel::completely_depolarizing(d))
    }

    /// Mixture of `m` Haar unitaries.
    #[staticmethod]
    #[pyo3(signature = (d, m = 3, seed = 0))]
    fn random_unital(d: usize, m: usize, seed: u64) -> PyResult<Self> {
        Ok(Self(channels::random_unital_channel(d, m, &mut rng(seed)).map_err(err)?))
    }

    #[staticmethod]
    #[pyo3(signature = (d_in, d_out, m = 2, seed = 0))]
    fn random(d_in: usize, d_out: usize, m: usize, seed: u64) -> PyResult<Self> {
        Ok(Self(channels::random_channel(d_in, d_out, m, &mut rng(seed)).map_err(err)?))
    }

    /// `Tr_{traced}` on a system with subsystem dims `dims`.
    #[staticmethod]
    fn partial_trace(dims: Vec<usize>, traced: usize) -> PyResult<Self> {
        Ok(Self(channels::ptrace_channel(&dims, traced).map_err(err)?))
    }

    #[getter]
    fn d_in(&self) -> usize {
        self.0.d_in()
    }

    #[getter]
    fn d_out(&self) -> usize {
        self.0.d_out()
    }

    #[getter]
    fn is_unital(&self) -> bool {
        self.0.is_unital()
    }

    fn apply(&self, rho: &PyDensityMatrix) -> PyResult<PyDensityMatrix> {
        Ok(PyDensityMatrix(self.0.apply_state(&rho.0).map_err(err)?))
    }

    /// Petz recovery map for reference `sigma`, applied to `x`.
    fn petz_recover(&self, sigma: &PyDensityMatrix, x: &PyDensityMatrix) -> PyResult<Vec<Vec<Complex64>>> {
        let petz = self.0.petz_map(&sigma.0).map_err(err)?;
        Ok(matrix_to(&petz.apply(x.0.matrix()).map_err(err)?))
    }

    fn __repr__(&self) -> String {
        format!(
            "KrausChannel(d_in={}, d_out={}, kraus={})",
            self.0.d_in(),
            self.0.d_out(),
            self.0.kraus().len()
        )
    }
}

#[pyfunction]
fn von_neumann(rho: &PyDensityMatrix) -> f64 {
    entropy::von_neumann(&rho.0)
}

/// `S(ρ‖μσ)`; `inf` when the support condition fails.
#[pyfunction]
#[pyo3(signature = (rho, sigma, mu = 1.0))]
fn relative_entropy(rho: &PyDensityMatrix, sigma: &PyDensityMatrix, mu: f64) -> PyResult<f64> {
    let s = states::SubnormalizedOperator::scaled(&sigma.0, mu).map_err(err)?;
    Ok(entropy::relative_entropy(&rho.0, &s).map_err(err)?.to_f64())
}

#[pyfunction]
fn renyi(alpha: f64, rho: &PyDensityMatrix, sigma: &PyDensityMatrix) -> PyResult<f64> {
    Ok(entropy::renyi(alpha, &rho.0, &sigma.0).map_err(err)?.to_f64())
}

#[pyfunction]
fn cmi(state: &PyMultipartiteState) -> PyResult<f64> {
    entropy::cmi(&state.0).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (state, tol = qel_core::tol::INEQ))]
fn check_ssa<'py>(py: Python<'py>, state: &PyMultipartiteState, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let v: Verdict = lab::check_ssa_strengthened(&state.0, tol).map_err(err)?.into();
    verdict_dict(py, &v)
}

#[pyfunction]
#[pyo3(signature = (rho, sigma, channel, tol = qel_core::tol::INEQ))]
fn check_stronger_monotonicity<'py>(
    py: Python<'py>,
    rho: &PyDensityMatrix,
    sigma: &PyDensityMatrix,
    channel: &PyKrausChannel,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let v: Verdict = lab::check_stronger_monotonicity(&rho.0, &sigma.0, &channel.0, tol)
        .map_err(err)?
        .into();
    verdict_dict(py, &v)
}

#[pyfunction]
#[pyo3(signature = (state, t_samples = None))]
fn markov_characterizations<'py>(
    py: Python<'py>,
    state: &PyMultipartiteState,
    t_samples: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyDict>> {
    let t = t_samples.unwrap_or_else(|| lab::DEFAULT_T_SAMPLES.to_vec());
    let v: Verdict = lab::markov_characterizations(&state.0, &t).map_err(err)?.into();
    verdict_dict(py, &v)
}

#[pyfunction]
#[pyo3(signature = (state, n_max = 64, tol = qel_core::tol::INEQ))]
fn trotter_sequence<'py>(
    py: Python<'py>,
    state: &PyMultipartiteState,
    n_max: u64,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let res = lab::trotter_sequence(&state.0, &suite::power_grid(n_max), tol).map_err(err)?;
    let d = verdict_dict(py, &Verdict::Trotter(res.clone()))?;
    d.set_item("n_values", res.n_values)?;
    d.set_item("t_values", res.t_values)?;
    d.set_item("trace_omega", res.trace_omega)?;
    Ok(d)
}

/// Runs checker suites; returns one verdict dict per `(checker, trial)`.
#[pyfunction]
#[pyo3(signature = (suite_names = "all", dims = vec![2, 2, 2], trials = 10, seed = 0, tol = qel_core::tol::INEQ, eps = qel_core::tol::DEFAULT_EPS))]
fn run_suite<'py>(
    py: Python<'py>,
    suite_names: &str,
    dims: Vec<usize>,
    trials: u64,
    seed: u64,
    tol: f64,
    eps: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut cfg = suite::SuiteConfig::new(suite::parse_suite(suite_names).map_err(err)?, &dims, trials, seed);
    cfg.tolerance = tol;
    cfg.eps = eps;
    let report = py.detach(|| suite::run_suite(&cfg)).map_err(err)?;
    report
        .records
        .iter()
        .map(|(c, v)| {
            let d = verdict_dict(py, v)?;
            d.set_item("checker", c.name())?;
            Ok(d)
        })
        .collect()
}

/// Names accepted by `run_suite`.
#[pyfunction]
fn checkers() -> Vec<&'static str> {
    suite::Checker::ALL.iter().map(|c| c.name()).collect()
}

/// Conjecture exploration summary: slack statistics and histogram.
#[pyfunction]
#[pyo3(signature = (kind, trials = 1000, dims = vec![2, 2, 2], seed = 0, ensemble = "random"))]
fn explore<'py>(
    py: Python<'py>,
    kind: &str,
    trials: u64,
    dims: Vec<usize>,
    seed: u64,
    ensemble: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = lab::ExploreConfig::new(kind.parse().map_err(err)?, trials, &dims, seed);
    cfg.ensemble = ensemble.parse().map_err(err)?;
    let ex = py.detach(|| lab::explore_conjecture(&cfg)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("kind", kind)?;
    d.set_item("completed", ex.completed)?;
    d.set_item("failed", ex.failed)?;
    d.set_item("min_slack", ex.min_slack)?;
    d.set_item("mean_slack", ex.mean_slack)?;
    d.set_item("max_slack", ex.max_slack)?;
    d.set_item("histogram_edges", ex.histogram.edges)?;
    d.set_item("histogram_counts", ex.histogram.counts)?;
    d.set_item("candidates", ex.candidates.len())?;
    Ok(d)
}

#[pymodule]
pub fn qel(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyMultipartiteState>()?;
    m.add_class::<PyKrausChannel>()?;
    m.add_function(wrap_pyfunction!(von_neumann, m)?)?;
    m.add_function(wrap_pyfunction!(relative_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(renyi, m)?)?;
    m.add_function(wrap_pyfunction!(cmi, m)?)?;
    m.add_function(wrap_pyfunction!(check_ssa, m)?)?;
    m.add_function(wrap_pyfunction!(check_stronger_monotonicity, m)?)?;
    m.add_function(wrap_pyfunction!(markov_characterizations, m)?)?;
    m.add_function(wrap_pyfunction!(trotter_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(checkers, m)?)?;
    m.add_function(wrap_pyfunction!(explore, m)?)?;
    Ok(())
}
