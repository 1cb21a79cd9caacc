//! Python bindings. Results are returned as plain dicts and lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use wva_core::heisenberg::{photon_distribution as distribution, FrequencyGrid, GridMode, PhotonCount};
use wva_core::noise::{self, BudgetOptions};
use wva_core::oracle::{monte_carlo_ensemble, McConfig};
use wva_core::squeezing::{self, SqueezeParams};
use wva_core::verify::{self as checks, VerifyOptions};
use wva_core::{fiducial, PulseParams, PulseSize, SelectionParams};

fn err(e: wva_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serializes through the stdlib `json` module.
fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "Pulse", frozen, from_py_object)]
#[derive(Clone)]
struct PyPulse(PulseParams);

#[pymethods]
impl PyPulse {
    /// Pulse energy in J unless `photon_number` is given; mass in kg.
    #[new]
    #[pyo3(signature = (omega0=fiducial::OMEGA0, sigma_tilde=fiducial::SIGMA_TILDE, pulse_energy=fiducial::PULSE_ENERGY, interval=fiducial::INTERVAL, mass=fiducial::MASS, photon_number=None))]
    fn new(
        omega0: f64,
        sigma_tilde: f64,
        pulse_energy: f64,
        interval: f64,
        mass: f64,
        photon_number: Option<f64>,
    ) -> PyResult<Self> {
        let size = match photon_number {
            Some(n) => PulseSize::Photons(n),
            None => PulseSize::Energy(pulse_energy),
        };
        PulseParams::with_sigma_tilde(omega0, sigma_tilde, size, interval, mass)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn fiducial() -> Self {
        Self(fiducial::si_pulse())
    }

    #[getter]
    fn omega0(&self) -> f64 {
        self.0.omega0()
    }

    #[getter]
    fn sigma_tilde(&self) -> f64 {
        self.0.sigma_tilde()
    }

    #[getter]
    fn photon_number(&self) -> f64 {
        self.0.photon_number()
    }

    #[getter]
    fn interval(&self) -> f64 {
        self.0.interval()
    }

    /// Rescaled so that the measurement intensity at `theta` equals `intensity`.
    fn at_intensity(&self, theta: f64, intensity: f64) -> PyResult<Self> {
        noise::pulse_for_intensity(&self.0, theta, intensity).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Pulse(omega0={:e}, sigma_tilde={}, photon_number={:e}, interval={:e})",
            self.0.omega0(),
            self.0.sigma_tilde(),
            self.0.photon_number(),
            self.0.interval()
        )
    }
}

#[pyclass(name = "Selection", frozen, from_py_object)]
#[derive(Clone)]
struct PySelection(SelectionParams);

#[pymethods]
impl PySelection {
    /// Displacement `ell` in metres, or a phase `phi` for the given pulse.
    #[new]
    #[pyo3(signature = (theta, ell=None, phi=None, pulse=None))]
    fn new(theta: f64, ell: Option<f64>, phi: Option<f64>, pulse: Option<PyPulse>) -> PyResult<Self> {
        let sel = match (ell, phi) {
            (Some(ell), None) => SelectionParams::new(theta, ell),
            (None, Some(phi)) => {
                let pulse = pulse.map(|p| p.0).unwrap_or_else(fiducial::si_pulse);
                SelectionParams::from_phase(theta, phi, &pulse)
            }
            _ => return Err(PyValueError::new_err("give exactly one of `ell` or `phi`")),
        };
        sel.map(Self).map_err(err)
    }

    #[staticmethod]
    fn noise_fiducial() -> Self {
        Self(fiducial::noise_selection())
    }

    #[staticmethod]
    fn figure_fiducial() -> Self {
        Self(fiducial::figure_selection())
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta()
    }

    #[getter]
    fn ell(&self) -> f64 {
        self.0.ell_metres()
    }

    fn phi(&self, pulse: &PyPulse) -> f64 {
        self.0.phi(&pulse.0)
    }

    fn __repr__(&self) -> String {
        format!("Selection(theta={:e}, ell={:e})", self.0.theta(), self.0.ell_metres())
    }
}

#[pyclass(name = "Squeeze", frozen, from_py_object)]
#[derive(Clone)]
struct PySqueeze(SqueezeParams);

#[pymethods]
impl PySqueeze {
    #[new]
    fn new(r_s1: f64, phi_s1: f64, r_s2: f64, phi_s2: f64) -> PyResult<Self> {
        SqueezeParams::new(r_s1, phi_s1, r_s2, phi_s2).map(Self).map_err(err)
    }

    /// Same factor `r` in both epochs.
    #[staticmethod]
    fn uniform(r: f64, phi_s1: f64, phi_s2: f64) -> PyResult<Self> {
        SqueezeParams::uniform(r, phi_s1, phi_s2).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        let s = self.0;
        format!("Squeeze(r_s1={}, phi_s1={}, r_s2={}, phi_s2={})", s.r_s1, s.phi_s1, s.r_s2, s.phi_s2)
    }
}

#[pyfunction]
fn measurement_intensity(pulse: &PyPulse, theta: f64) -> f64 {
    wva_core::measurement_intensity(&pulse.0, theta).i
}

#[pyfunction]
fn sql_displacement(pulse: &PyPulse) -> f64 {
    noise::sql_displacement(&pulse.0)
}

/// Returns `{"ell_min": ..., "ell_sql": ...}` in metres.
#[pyfunction]
fn minimum_displacement<'py>(py: Python<'py>, pulse: &PyPulse, sel: &PySelection) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &noise::minimum_displacement(&pulse.0, &sel.0))
}

/// Shot, radiation-pressure and total variance of the `Omega~` estimate.
#[pyfunction]
#[pyo3(signature = (pulse, sel, squeeze=None, exact_n=false))]
fn noise_budget<'py>(
    py: Python<'py>,
    pulse: &PyPulse,
    sel: &PySelection,
    squeeze: Option<PySqueeze>,
    exact_n: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let budget = match squeeze {
        Some(sq) => squeezing::squeezed_variance(&pulse.0, &sel.0, &sq.0),
        None => {
            let photon_count = if exact_n { PhotonCount::Exact } else { PhotonCount::Approx };
            noise::total_variance_with(&pulse.0, &sel.0, BudgetOptions { photon_count })
        }
    }
    .map_err(err)?;
    to_py(py, &budget)
}

#[pyfunction]
fn snr<'py>(py: Python<'py>, pulse: &PyPulse, sel: &PySelection) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &noise::snr(&pulse.0, &sel.0).map_err(err)?)
}

/// `R_s^2` against the SQL as a function of the measurement intensity.
#[pyfunction]
fn ratio_curve(intensity: f64, squeeze: &PySqueeze) -> f64 {
    squeezing::ratio_curve(intensity, &squeeze.0)
}

#[pyfunction]
fn optimize_angles<'py>(py: Python<'py>, pulse: &PyPulse, sel: &PySelection, r: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &squeezing::optimize_angles(&pulse.0, &sel.0, r).map_err(err)?)
}

/// `(omega_tilde, n_bar)` on the default grid; `n_bar` is `rho` when normalized.
#[pyfunction]
#[pyo3(signature = (pulse, sel, normalized=false))]
fn photon_distribution(pulse: &PyPulse, sel: &PySelection, normalized: bool) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let grid = FrequencyGrid::default_for(pulse.0.sigma_tilde(), GridMode::Physical);
    let d = distribution(&grid, &pulse.0, &sel.0);
    if normalized {
        let d = d.normalized().map_err(err)?;
        Ok((grid.points().to_vec(), d.rho()))
    } else {
        Ok((grid.points().to_vec(), d.values().to_vec()))
    }
}

#[pyfunction]
#[pyo3(signature = (pulse, sel, n_pulses=10_000, seed=0, squeeze=None))]
fn monte_carlo<'py>(
    py: Python<'py>,
    pulse: &PyPulse,
    sel: &PySelection,
    n_pulses: usize,
    seed: u64,
    squeeze: Option<PySqueeze>,
) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = McConfig::new(n_pulses, seed);
    cfg.squeeze = squeeze.map(|s| s.0);
    let (p, s) = (pulse.0, sel.0);
    let est = py.detach(|| monte_carlo_ensemble(&p, &s, &cfg)).map_err(err)?;
    to_py(py, &est)
}

/// Runs the self-check suite and returns the report.
#[pyfunction]
#[pyo3(signature = (seed=VerifyOptions::default().seed, mc_pulses=VerifyOptions::default().mc_pulses, strict=None))]
fn verify<'py>(py: Python<'py>, seed: u64, mc_pulses: usize, strict: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    let opts = VerifyOptions {
        seed,
        mc_pulses,
        strict,
    };
    let report = py.detach(|| checks::run(opts));
    to_py(py, &report)
}

#[pymodule]
fn wva_sql(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPulse>()?;
    m.add_class::<PySelection>()?;
    m.add_class::<PySqueeze>()?;
    m.add_function(wrap_pyfunction!(measurement_intensity, m)?)?;
    m.add_function(wrap_pyfunction!(sql_displacement, m)?)?;
    m.add_function(wrap_pyfunction!(minimum_displacement, m)?)?;
    m.add_function(wrap_pyfunction!(noise_budget, m)?)?;
    m.add_function(wrap_pyfunction!(snr, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_curve, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_angles, m)?)?;
    m.add_function(wrap_pyfunction!(photon_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
