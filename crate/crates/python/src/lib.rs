//! Python bindings: models, stroboscopic evolution, Magnus terms, resonance
//! weights and the experiment drivers.

use std::path::Path;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use floqsim::cli::{self, ExperimentConfig, OmegaGrid};
use floqsim::floquet::{self, Branch};
use floqsim::models::{self, DriveSpec, DrivenModel};
use floqsim::observables;
use floqsim::propagate::{period_propagator, stroboscopic_evolve, PropagatorOptions, StateVector};
use floqsim::FloqError;

fn py_err(e: FloqError) -> PyErr {
    if e.is_config() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

type ComplexRows = Vec<Vec<Complex64>>;

fn rows(m: &floqsim::linalg::CMatrix) -> ComplexRows {
    (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
}

/// Driven lattice model in its working basis.
#[pyclass(name = "Model", module = "floqsim_py", skip_from_py_object)]
#[derive(Clone)]
pub struct PyModel {
    inner: DrivenModel,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    #[pyo3(signature = (sites, particles, n_max, drive_omega, u = models::DEFAULT_U, j0 = models::DEFAULT_J0))]
    fn bose_hubbard(sites: usize, particles: i32, n_max: u8, drive_omega: f64, u: f64, j0: f64) -> PyResult<Self> {
        let drive = DriveSpec::new(j0, drive_omega).map_err(py_err)?;
        let inner = models::build_bose_hubbard(sites, particles, n_max, u, 1.0, drive).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (sites, drive_omega, u = models::DEFAULT_U, j0 = models::DEFAULT_J0))]
    fn spin1_xxz(sites: usize, drive_omega: f64, u: f64, j0: f64) -> PyResult<Self> {
        let drive = DriveSpec::new(j0, drive_omega).map_err(py_err)?;
        let inner = models::build_spin1_xxz(sites, u, drive).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Jaynes-Cummings-Hubbard chain, returned in the polariton frame.
    #[staticmethod]
    #[pyo3(signature = (sites, excitations, n_max_photons, g, drive_omega, delta = 0.0, j0 = models::DEFAULT_J0))]
    fn jch(sites: usize, excitations: i32, n_max_photons: u8, g: f64, drive_omega: f64, delta: f64, j0: f64) -> PyResult<Self> {
        let drive = DriveSpec::new(j0, drive_omega).map_err(py_err)?;
        let inner = models::build_jch(sites, excitations, n_max_photons, g, 1.0, 1.0 + delta, drive)
            .and_then(|m| m.to_polariton_frame())
            .map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Model described by a TOML experiment configuration.
    #[staticmethod]
    fn from_config(text: &str) -> PyResult<Self> {
        let cfg = ExperimentConfig::from_toml(text).map_err(py_err)?;
        Ok(Self { inner: cfg.build_model().map_err(py_err)? })
    }

    fn restrict_parity(&self, sign: i8) -> PyResult<Self> {
        Ok(Self { inner: self.inner.restrict_parity(sign).map_err(py_err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn sector_dim(&self) -> usize {
        self.inner.sector().dim()
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.drive().omega
    }

    #[getter]
    fn period(&self) -> f64 {
        self.inner.drive().period_eff()
    }

    fn configurations(&self) -> Vec<Vec<i8>> {
        self.inner.sector().configs().iter().map(|c| c.labels().to_vec()).collect()
    }

    fn product_state(&self, labels: Vec<i8>) -> PyResult<Vec<Complex64>> {
        self.inner.product_state(&labels).map_err(py_err)
    }

    fn trimer_states(&self) -> PyResult<Vec<Vec<Complex64>>> {
        self.inner.trimer_states().map_err(py_err)
    }

    /// `(hf0, hf1)` as nested lists.
    fn magnus(&self) -> PyResult<(ComplexRows, ComplexRows)> {
        let m = floquet::magnus(&self.inner).map_err(py_err)?;
        Ok((rows(&m.hf0), rows(&m.hf1)))
    }

    /// Amplitudes at `t = 0, T, …, periods·T` starting from a configuration.
    fn evolve_stroboscopic(&self, initial: Vec<i8>, periods: usize) -> PyResult<Vec<Vec<Complex64>>> {
        let amps = self.inner.product_state(&initial).map_err(py_err)?;
        let psi0 = StateVector::new(amps, self.inner.basis().id(), 0.0).map_err(py_err)?;
        let prop = period_propagator(&self.inner, &PropagatorOptions::default()).map_err(py_err)?;
        let states = stroboscopic_evolve(&prop, &psi0, periods).map_err(py_err)?;
        Ok(states.into_iter().map(StateVector::into_amps).collect())
    }

    fn participation_ratio(&self, amps: Vec<Complex64>) -> PyResult<f64> {
        let psi = self.state(amps)?;
        observables::participation_ratio_in(self.inner.basis(), &psi).map_err(py_err)
    }

    fn entropy(&self, amps: Vec<Complex64>, cut: usize) -> PyResult<f64> {
        let psi = self.state(amps)?;
        observables::von_neumann_entropy(self.inner.basis(), &psi, cut).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(kind={}, dim={}, omega={})",
            self.inner.kind().name(),
            self.inner.dim(),
            self.inner.drive().omega
        )
    }
}

impl PyModel {
    fn state(&self, amps: Vec<Complex64>) -> PyResult<StateVector> {
        StateVector::new(amps, self.inner.basis().id(), 0.0).map_err(py_err)
    }
}

#[pyfunction]
#[pyo3(signature = (omega, u, m_j, m_k, branch = "plus"))]
fn resonance_weight(omega: f64, u: f64, m_j: i32, m_k: i32, branch: &str) -> PyResult<Complex64> {
    let b = match branch {
        "plus" => Branch::Plus,
        "minus" => Branch::Minus,
        other => return Err(PyValueError::new_err(format!("branch must be plus or minus, got {other}"))),
    };
    Ok(floquet::resonance_weight(omega, u, m_j, m_k, b))
}

/// `(F1, F2)` in units of `J0²`.
#[pyfunction]
fn fractional_weight(omega: f64, u: f64, m_j: i32, m_k: i32, m_l: i32) -> PyResult<(Complex64, Complex64)> {
    let w = floquet::fractional_weight(omega, u, m_j, m_k, m_l).map_err(py_err)?;
    Ok((w.f1, w.f2))
}

/// Run a TOML configuration; returns the manifest as JSON text.
#[pyfunction]
fn run_config(text: &str, out_dir: &str) -> PyResult<String> {
    let cfg = ExperimentConfig::from_toml(text).map_err(py_err)?;
    cli::run(&cfg, Path::new(out_dir)).map_err(py_err)?;
    std::fs::read_to_string(Path::new(out_dir).join("manifest.json")).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pyfunction]
fn sweep_omega(text: &str, grid: &str, out_dir: &str) -> PyResult<()> {
    let cfg = ExperimentConfig::from_toml(text).map_err(py_err)?;
    let grid = OmegaGrid::parse(grid).map_err(py_err)?;
    cli::sweep_omega(&cfg, &grid, Path::new(out_dir)).map_err(py_err)?;
    Ok(())
}

#[pyfunction]
fn run_preset(name: &str, out_dir: &str) -> PyResult<()> {
    cli::run_preset(name, Path::new(out_dir)).map_err(py_err)
}

#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    cli::PRESET_NAMES.to_vec()
}

#[pymodule]
fn floqsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(resonance_weight, m)?)?;
    m.add_function(wrap_pyfunction!(fractional_weight, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_omega, m)?)?;
    m.add_function(wrap_pyfunction!(run_preset, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add("DEFAULT_J0", models::DEFAULT_J0)?;
    m.add("DEFAULT_U", models::DEFAULT_U)?;
    Ok(())
}
