//! Python bindings. States, coupling profiles and propagator parameters are
//! immutable wrappers; matrices come back as nested lists of complex numbers.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use collective_dfs::config::{preset, Format, RunConfig, PRESETS};
use collective_dfs::propagator::{self, DecayRate};
use collective_dfs::{dfs, entanglement, evolution, runner, Complex64, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Numerical(_) | Error::NotNormalized { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for collective_dfs::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Lorentzian bath reduced to `(γ, r)`.
#[pyclass(name = "Propagator", module = "collective_dfs", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPropagator(propagator::PropagatorParams);

#[pymethods]
impl PyPropagator {
    #[new]
    fn new(gamma: f64, r: f64) -> PyResult<Self> {
        propagator::PropagatorParams::new(gamma, r).py().map(Self)
    }

    /// `γ = 1`, `r = R`.
    #[staticmethod]
    fn from_ratio(ratio: f64) -> PyResult<Self> {
        propagator::PropagatorParams::from_ratio(ratio).py().map(Self)
    }

    /// From bath width `γ`, strength `λ` and the total coupling `α_T`.
    #[staticmethod]
    fn from_bath(lam: f64, gamma: f64, alpha_total: f64) -> PyResult<Self> {
        let bath = propagator::BathSpec::new(lam, gamma, 0.0).py()?;
        propagator::PropagatorParams::from_bath(&bath, alpha_total).py().map(Self)
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    #[getter]
    fn r(&self) -> f64 {
        self.0.r()
    }

    fn phi(&self, t: f64) -> f64 {
        propagator::phi(t, &self.0)
    }

    fn phi_dot(&self, t: f64) -> f64 {
        propagator::phi_dot(t, &self.0)
    }

    /// `Γ(t) = −2Φ̇/Φ`; `None` where `Φ` vanishes.
    fn decay_rate(&self, t: f64) -> Option<f64> {
        match propagator::decay_rate(t, &self.0) {
            DecayRate::Finite(g) => Some(g),
            DecayRate::Pole => None,
        }
    }

    fn is_cp_divisible(&self) -> bool {
        propagator::is_cp_divisible(&self.0)
    }

    fn first_phi_zero(&self) -> Option<f64> {
        propagator::first_phi_zero(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Propagator(gamma={}, r={})", self.0.gamma(), self.0.r())
    }
}

#[pyclass(name = "Couplings", module = "collective_dfs", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCouplings(collective_dfs::CouplingProfile);

#[pymethods]
impl PyCouplings {
    #[new]
    fn new(alphas: Vec<f64>) -> PyResult<Self> {
        collective_dfs::CouplingProfile::new(alphas).py().map(Self)
    }

    #[staticmethod]
    fn uniform(n: usize) -> PyResult<Self> {
        collective_dfs::CouplingProfile::uniform(n).py().map(Self)
    }

    /// Three qubits with normalized weights `(r₁, r₂, √(1 − r₁² − r₂²))`.
    #[staticmethod]
    fn from_r12(r1: f64, r2: f64) -> PyResult<Self> {
        collective_dfs::CouplingProfile::from_r12(r1, r2).py().map(Self)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn alphas(&self) -> Vec<f64> {
        self.0.alphas().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.0.weights().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("Couplings({:?})", self.0.alphas())
    }
}

/// Single-excitation state plus a `|g…g⟩` amplitude. Qubit 0 is the most
/// significant bit of the basis index.
#[pyclass(name = "State", module = "collective_dfs", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyState(collective_dfs::SectorState);

#[pymethods]
impl PyState {
    #[new]
    #[pyo3(signature = (amplitudes, ground = Complex64::new(0.0, 0.0)))]
    fn new(amplitudes: Vec<Complex64>, ground: Complex64) -> PyResult<Self> {
        collective_dfs::SectorState::new(amplitudes, ground).py().map(Self)
    }

    /// Amplitudes `(√((1+2p)/3), √((1−p)/3)·e^{iθ}, √((1−p)/3)·e^{iϕ})`:
    /// `p = 0` with zero phases is W, `p = 1` is `|egg⟩`.
    #[staticmethod]
    fn from_family(p: f64, theta: f64, phi: f64) -> PyResult<Self> {
        evolution::initial_coefficients(&evolution::InitialFamily { p, theta, phi }).py().map(Self)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    #[getter]
    fn ground(&self) -> Complex64 {
        self.0.ground()
    }

    /// `Q = Σ|a_j|²`.
    #[getter]
    fn excited_weight(&self) -> f64 {
        self.0.excited_weight()
    }

    fn density_matrix(&self) -> PyResult<Vec<Vec<Complex64>>> {
        let rho = evolution::density_matrix(&self.0).py()?;
        let m = rho.matrix();
        Ok((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect())
    }

    fn __repr__(&self) -> String {
        let amps: Vec<String> = self.0.amplitudes().iter().map(|z| format!("{z}")).collect();
        format!("State([{}], ground={})", amps.join(", "), self.0.ground())
    }
}

#[pyfunction]
fn evolve(state: &PyState, couplings: &PyCouplings, propagator: &PyPropagator, t: f64) -> PyResult<PyState> {
    evolution::evolve(&state.0, &couplings.0, &propagator.0, t).py().map(PyState)
}

#[pyfunction]
fn evolve_to_phi(state: &PyState, couplings: &PyCouplings, phi: f64) -> PyResult<PyState> {
    evolution::evolve_to_phi(&state.0, &couplings.0, phi).py().map(PyState)
}

/// `t → ∞` state: only the dark component survives.
#[pyfunction]
fn asymptotic_state(state: &PyState, couplings: &PyCouplings) -> PyResult<PyState> {
    entanglement::asymptotic_state(&state.0, &couplings.0).py().map(PyState)
}

/// Negativity of the bipartition `subset | rest`, from the partial transpose.
#[pyfunction]
fn negativity(state: &PyState, subset: Vec<usize>) -> PyResult<f64> {
    let rho = evolution::density_matrix(&state.0).py()?;
    entanglement::negativity(&rho, &subset).py()
}

/// One-vs-rest negativities `N_j = √(μ_j(1−μ_j))`.
#[pyfunction]
fn pure_sector_negativities(state: &PyState) -> PyResult<Vec<f64>> {
    entanglement::pure_sector_negativities(&state.0).py()
}

#[pyfunction]
fn tripartite_negativity(state: &PyState) -> PyResult<f64> {
    entanglement::tripartite_negativity(&state.0).py()
}

#[pyfunction]
fn ncr_star(state: &PyState) -> PyResult<f64> {
    entanglement::ncr_star(&state.0).py()
}

#[pyfunction]
fn concurrence(state: &PyState) -> PyResult<f64> {
    entanglement::concurrence_two_qubit(&state.0).py()
}

/// First time a qubit factors out, as a dict, or `None`.
#[pyfunction]
fn find_tstar<'py>(
    py: Python<'py>,
    state: &PyState,
    couplings: &PyCouplings,
    propagator: &PyPropagator,
) -> PyResult<Option<Bound<'py, PyDict>>> {
    let Some(ts) = entanglement::find_tstar(&state.0, &couplings.0, &propagator.0).py()? else {
        return Ok(None);
    };
    let d = PyDict::new(py);
    d.set_item("time", ts.time)?;
    d.set_item("qubit", ts.qubit)?;
    d.set_item("phi_star", ts.phi_star)?;
    d.set_item("purity_deficit", ts.purity_deficit)?;
    Ok(Some(d))
}

#[pyfunction]
fn superradiant_state(couplings: &PyCouplings) -> PyState {
    PyState(dfs::superradiant_state(&couplings.0))
}

/// Orthonormal basis of the `n − 1` dark states.
#[pyfunction]
fn subradiant_basis(couplings: &PyCouplings) -> Vec<PyState> {
    dfs::subradiant_basis(&couplings.0).into_iter().map(PyState).collect()
}

#[pyfunction]
fn dfs_dimension(couplings: &PyCouplings) -> usize {
    dfs::dfs_dimension(&couplings.0)
}

/// `(η₊, [η₋ⁱ])`.
#[pyfunction]
fn decompose(state: &PyState, couplings: &PyCouplings) -> PyResult<(Complex64, Vec<Complex64>)> {
    let d = dfs::decompose(&state.0, &couplings.0).py()?;
    Ok((d.eta_plus, d.eta_minus))
}

/// Norm of the collective-coupling overlap; zero for a dark state.
#[pyfunction]
fn verify_dark(state: &PyState, couplings: &PyCouplings) -> PyResult<f64> {
    dfs::verify_dark(&state.0, &couplings.0).py()
}

/// Run a CLI scenario and return its rendered table.
#[pyfunction]
#[pyo3(signature = (command, config = None, preset_name = None, format = "csv", threads = None))]
fn run(
    py: Python<'_>,
    command: &str,
    config: Option<&str>,
    preset_name: Option<&str>,
    format: &str,
    threads: Option<usize>,
) -> PyResult<String> {
    let cfg = match (config, preset_name) {
        (Some(text), None) => RunConfig::from_json(text).py()?,
        (None, Some(name)) => preset(name)
            .ok_or_else(|| PyValueError::new_err(format!("unknown preset `{name}`")))?,
        _ => return Err(PyValueError::new_err("pass exactly one of config or preset_name")),
    };
    let format = match format {
        "csv" => Format::Csv,
        "json" => Format::Json,
        other => return Err(PyValueError::new_err(format!("unknown format `{other}`"))),
    };
    let report = py
        .detach(|| match command {
            "simulate" => runner::simulate(&cfg),
            "sweep" => runner::sweep(&cfg, threads),
            "tstar" => runner::tstar(&cfg),
            "markov" => runner::markov(&cfg),
            "oracle-check" => runner::oracle_check(&cfg),
            "nqubit" => runner::nqubit(&cfg),
            other => Err(Error::Config(format!("unknown command `{other}`"))),
        })
        .py()?;
    Ok(report.render(format, &cfg))
}

#[pymodule]
#[pyo3(name = "collective_dfs")]
pub fn init_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPropagator>()?;
    m.add_class::<PyCouplings>()?;
    m.add_class::<PyState>()?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_to_phi, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_state, m)?)?;
    m.add_function(wrap_pyfunction!(negativity, m)?)?;
    m.add_function(wrap_pyfunction!(pure_sector_negativities, m)?)?;
    m.add_function(wrap_pyfunction!(tripartite_negativity, m)?)?;
    m.add_function(wrap_pyfunction!(ncr_star, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(find_tstar, m)?)?;
    m.add_function(wrap_pyfunction!(superradiant_state, m)?)?;
    m.add_function(wrap_pyfunction!(subradiant_basis, m)?)?;
    m.add_function(wrap_pyfunction!(dfs_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(verify_dark, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("PRESETS", PRESETS.to_vec())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
