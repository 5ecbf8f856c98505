//! Python bindings. Matrices cross the boundary as lists of rows.

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use circarray::fourier;
use circarray::gaussian::{self, Route};
use circarray::model::{self, Basis, PumpProfile};
use circarray::witness;
use circarray::{io, Error};

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn rows<T: nalgebra::Scalar + Copy>(m: &nalgebra::DMatrix<T>) -> Vec<Vec<T>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn parse_pump(spec: &str) -> PyResult<PumpProfile> {
    spec.parse().map_err(err)
}

fn parse_route(route: &str) -> PyResult<Route> {
    match route {
        "auto" => Ok(Route::Auto),
        "oracle" => Ok(Route::Oracle),
        "analytic" => Ok(Route::Analytic),
        _ => Err(PyValueError::new_err(format!(
            "route must be 'auto', 'oracle' or 'analytic', got {route:?}"
        ))),
    }
}

#[pyclass(name = "ArrayConfig", module = "circarray_py", from_py_object)]
#[derive(Clone)]
pub struct PyArrayConfig {
    inner: model::ArrayConfig,
}

#[pymethods]
impl PyArrayConfig {
    /// `pump` is `r0`, `rN2`, `rN4` or `general:<r>`; use `with_phases` for a
    /// custom profile.
    #[new]
    #[pyo3(signature = (n_modes, coupling_per_mm, eta_per_mm, pump = "r0", z_max_mm = 20.0, z_steps = 400, transmittance = 1.0))]
    fn new(
        n_modes: usize,
        coupling_per_mm: f64,
        eta_per_mm: f64,
        pump: &str,
        z_max_mm: f64,
        z_steps: usize,
        transmittance: f64,
    ) -> PyResult<Self> {
        let mut inner = model::ArrayConfig::new(n_modes, coupling_per_mm, eta_per_mm, parse_pump(pump)?);
        inner.z_max_mm = z_max_mm;
        inner.z_steps = z_steps;
        inner.transmittance = transmittance;
        Ok(PyArrayConfig { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| err(e.into()))?;
        Ok(PyArrayConfig { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("config serializes")
    }

    fn with_phases(&self, phases_rad: Vec<f64>) -> Self {
        PyArrayConfig {
            inner: self.inner.with_pump(PumpProfile::Custom { phases_rad }),
        }
    }

    #[getter]
    fn n_modes(&self) -> usize {
        self.inner.n_modes
    }

    #[getter]
    fn coupling_per_mm(&self) -> f64 {
        self.inner.coupling_per_mm
    }

    #[getter]
    fn eta_per_mm(&self) -> f64 {
        self.inner.eta_per_mm
    }

    #[getter]
    fn pump(&self) -> String {
        self.inner.pump.label()
    }

    #[getter]
    fn transmittance(&self) -> f64 {
        self.inner.transmittance
    }

    /// Error messages; empty when valid.
    fn validate(&self) -> Vec<String> {
        model::validate_config(&self.inner)
            .errors
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    fn z_grid(&self) -> Vec<f64> {
        self.inner.z_grid()
    }

    fn config_hash(&self) -> String {
        io::config_hash(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("ArrayConfig({})", self.to_json())
    }
}

#[pyclass(name = "Covariance", module = "circarray_py", skip_from_py_object)]
pub struct PyCovariance {
    inner: gaussian::CovarianceMatrix,
}

#[pyclass(name = "PairValue", module = "circarray_py", get_all, skip_from_py_object)]
pub struct PyPairValue {
    a: usize,
    b: usize,
    theta_a: f64,
    theta_b: f64,
    value: f64,
}

#[pyclass(name = "VlfReport", module = "circarray_py", get_all, skip_from_py_object)]
pub struct PyVlfReport {
    pairs: Vec<Py<PyPairValue>>,
    threshold: f64,
    set: Vec<usize>,
    fully_inseparable: bool,
    transmittance_applied: f64,
    pure: bool,
    note: Option<&'static str>,
}

#[pyclass(name = "Diagnostics", module = "circarray_py", get_all, skip_from_py_object)]
pub struct PyDiagnostics {
    determinant: f64,
    min_uncertainty_eigenvalue: f64,
    is_pure: bool,
    is_physical: bool,
    flags: Vec<String>,
}

#[pymethods]
impl PyCovariance {
    /// Wraps a symmetric matrix given as rows. `basis` is `individual` or `fourier`.
    #[new]
    #[pyo3(signature = (rows, basis = "individual", z = 0.0))]
    fn new(rows: Vec<Vec<f64>>, basis: &str, z: f64) -> PyResult<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        let basis = match basis {
            "individual" => Basis::Individual,
            "fourier" => Basis::Fourier,
            _ => return Err(PyValueError::new_err(format!("unknown basis {basis:?}"))),
        };
        let m = nalgebra::DMatrix::from_fn(dim, dim, |r, c| rows[r][c]);
        Ok(PyCovariance {
            inner: gaussian::CovarianceMatrix::new(m, basis, z).map_err(err)?,
        })
    }

    #[staticmethod]
    fn vacuum(n_modes: usize) -> Self {
        PyCovariance {
            inner: gaussian::CovarianceMatrix::vacuum(n_modes, Basis::Individual, 0.0),
        }
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        rows(self.inner.matrix())
    }

    #[getter]
    fn z(&self) -> f64 {
        self.inner.z()
    }

    #[getter]
    fn basis(&self) -> String {
        self.inner.basis().to_string()
    }

    #[getter]
    fn n_modes(&self) -> usize {
        self.inner.n_modes()
    }

    #[getter]
    fn transmittance(&self) -> f64 {
        self.inner.transmittance()
    }

    fn apply_loss(&self, transmittance: f64) -> PyResult<Self> {
        Ok(PyCovariance {
            inner: gaussian::apply_loss(&self.inner, transmittance).map_err(err)?,
        })
    }

    fn vlf_pair(&self, a: usize, b: usize, theta_a: f64, theta_b: f64) -> PyResult<f64> {
        witness::vlf_pair(&self.inner, a, b, theta_a, theta_b).map_err(err)
    }

    #[pyo3(signature = (set, angles = None))]
    fn full_inseparability(&self, py: Python<'_>, set: Vec<usize>, angles: Option<Vec<f64>>) -> PyResult<PyVlfReport> {
        let r = witness::full_inseparability_check(&self.inner, &set, angles.as_deref()).map_err(err)?;
        let note = r.genuine_note();
        let pairs = r
            .pairs
            .iter()
            .map(|p| {
                Py::new(
                    py,
                    PyPairValue {
                        a: p.a,
                        b: p.b,
                        theta_a: p.theta_a,
                        theta_b: p.theta_b,
                        value: p.value,
                    },
                )
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyVlfReport {
            pairs,
            threshold: r.threshold,
            set: r.set,
            fully_inseparable: r.fully_inseparable,
            transmittance_applied: r.transmittance_applied,
            pure: r.pure,
            note,
        })
    }

    /// `(θ_a, θ_b, min value)`
    fn angle_scan(&self, a: usize, b: usize, grid_size: usize) -> PyResult<(f64, f64, f64)> {
        let s = witness::angle_scan(&self.inner, a, b, grid_size).map_err(err)?;
        Ok((s.theta_a, s.theta_b, s.value))
    }

    fn diagnostics(&self) -> PyDiagnostics {
        let d = gaussian::purity_and_symplectic_report(&self.inner, None);
        PyDiagnostics {
            determinant: d.determinant,
            min_uncertainty_eigenvalue: d.min_uncertainty_eigenvalue,
            is_pure: d.is_pure(),
            is_physical: d.is_physical(),
            flags: d.flags,
        }
    }

    fn to_fourier(&self) -> PyResult<Self> {
        let basis = fourier::dft_matrix(self.inner.n_modes()).map_err(err)?;
        Ok(PyCovariance {
            inner: fourier::change_basis(&self.inner, &basis, fourier::BasisChange::IndividualToFourier).map_err(err)?,
        })
    }

    /// CSV text as written by the CLI.
    #[pyo3(signature = (config, display = false))]
    fn to_csv(&self, config: &PyArrayConfig, display: bool) -> String {
        if display {
            io::covariance_to_display_csv(&config.inner, &self.inner)
        } else {
            io::covariance_to_csv(&config.inner, &self.inner)
        }
    }
}

/// Lossless covariance at `z`, then the config's transmittance.
#[pyfunction]
#[pyo3(signature = (config, z, route = "auto"))]
fn covariance(config: &PyArrayConfig, z: f64, route: &str) -> PyResult<PyCovariance> {
    let v = gaussian::covariance_at(&config.inner, z, parse_route(route)?).map_err(err)?;
    let v = gaussian::apply_loss(&v, config.inner.transmittance).map_err(err)?;
    Ok(PyCovariance { inner: v })
}

#[pyfunction]
fn dft_matrix(n_modes: usize) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(rows(fourier::dft_matrix(n_modes).map_err(err)?.entries()))
}

#[pyfunction]
fn eigenvalues(n_modes: usize, coupling_per_mm: f64) -> PyResult<Vec<f64>> {
    Ok(fourier::eigenvalues(n_modes, coupling_per_mm).map_err(err)?.values().to_vec())
}

#[pyfunction]
fn zero_mode_indices(n_modes: usize) -> Option<(usize, usize)> {
    fourier::zero_mode_indices(n_modes)
}

#[pyfunction]
fn drift_matrix(config: &PyArrayConfig) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows(&model::build_drift_matrix(&config.inner).map_err(err)?))
}

#[pyfunction]
fn partition_mode_sets(n_modes: usize) -> (Vec<usize>, Vec<usize>) {
    witness::partition_mode_sets(n_modes)
}

#[pymodule]
fn circarray_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}

/// Adds every class and function to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyArrayConfig>()?;
    m.add_class::<PyCovariance>()?;
    m.add_class::<PyVlfReport>()?;
    m.add_class::<PyPairValue>()?;
    m.add_class::<PyDiagnostics>()?;
    m.add_function(wrap_pyfunction!(covariance, m)?)?;
    m.add_function(wrap_pyfunction!(dft_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(zero_mode_indices, m)?)?;
    m.add_function(wrap_pyfunction!(drift_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(partition_mode_sets, m)?)?;
    m.add("VLF_THRESHOLD", witness::VLF_THRESHOLD)?;
    Ok(())
}
