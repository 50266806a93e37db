//! Python bindings. All quantities are SI, as in the core library: angular
//! frequencies in rad/s, wavelengths and lengths in m, velocities in m/s.

use photon_switch as core;
use photon_switch::disorder::DisorderTarget;
use photon_switch::{Complex64, GridAxis, Mitigation, Mode};
use pyo3::exceptions::{PyArithmeticError, PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: core::Error) -> PyErr {
    use core::Error as E;
    match e {
        E::InvalidParameter(_) | E::InvalidLayout(_) => PyValueError::new_err(e.to_string()),
        E::IndexOutOfRange { .. } => PyIndexError::new_err(e.to_string()),
        _ => PyArithmeticError::new_err(e.to_string()),
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "reflection" => Ok(Mode::Reflection),
        "transmission" => Ok(Mode::Transmission),
        _ => Err(PyValueError::new_err(format!("mode must be 'reflection' or 'transmission', got {mode:?}"))),
    }
}

fn parse_axis(axis: &str) -> PyResult<GridAxis> {
    match axis {
        "wavelength_nm" => Ok(GridAxis::WavelengthNm),
        "omega_rad_s" => Ok(GridAxis::FrequencyRadS),
        _ => Err(PyValueError::new_err(format!("axis must be 'wavelength_nm' or 'omega_rad_s', got {axis:?}"))),
    }
}

fn parse_target(target: &str) -> PyResult<DisorderTarget> {
    Ok(match target {
        "cavity_wavelength" => DisorderTarget::CavityWavelength,
        "emitter_wavelength" => DisorderTarget::EmitterWavelength,
        "emitter_follows_cavity" => DisorderTarget::EmitterFollowsCavity,
        "coupled_q" => DisorderTarget::CoupledQ,
        "separation" => DisorderTarget::Separation,
        _ => return Err(PyValueError::new_err(format!("unknown disorder target {target:?}"))),
    })
}

/// One emitter-loaded cavity; rates in rad/s.
#[pyclass(name = "Cavity", module = "photon_switch", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyCavity(core::EmitterCavityParams);

#[pymethods]
impl PyCavity {
    #[new]
    #[pyo3(signature = (omega_c, omega_e, g, v_r, v_l, kappa, gamma))]
    fn new(omega_c: f64, omega_e: f64, g: f64, v_r: f64, v_l: f64, kappa: f64, gamma: f64) -> Self {
        Self(core::EmitterCavityParams { omega_c, omega_e, g, v_r, v_l, kappa, gamma })
    }

    /// From wavelengths (m), rates quoted as rate/2π (Hz) and Q factors.
    #[staticmethod]
    #[pyo3(signature = (lambda_c, g_over_2pi, q_coupled, q_intrinsic, gamma_over_2pi, lambda_e=None))]
    fn from_q(
        lambda_c: f64,
        g_over_2pi: f64,
        q_coupled: f64,
        q_intrinsic: f64,
        gamma_over_2pi: f64,
        lambda_e: Option<f64>,
    ) -> PyResult<Self> {
        let q = core::QFactorSpec { q_coupled, q_intrinsic };
        core::params_from_q_factors(lambda_c, lambda_e.unwrap_or(lambda_c), g_over_2pi, q, gamma_over_2pi)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn omega_c(&self) -> f64 {
        self.0.omega_c
    }
    #[getter]
    fn omega_e(&self) -> f64 {
        self.0.omega_e
    }
    #[getter]
    fn g(&self) -> f64 {
        self.0.g
    }
    #[getter]
    fn v_r(&self) -> f64 {
        self.0.v_r
    }
    #[getter]
    fn v_l(&self) -> f64 {
        self.0.v_l
    }
    #[getter]
    fn kappa(&self) -> f64 {
        self.0.kappa
    }
    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma
    }
    #[getter]
    fn cavity_wavelength(&self) -> f64 {
        self.0.cavity_wavelength()
    }
    #[getter]
    fn coupled_q(&self) -> f64 {
        self.0.coupled_q()
    }

    fn with_coupling(&self, g: f64) -> Self {
        Self(self.0.with_coupling(g))
    }

    fn with_coupled_q(&self, q: f64) -> Self {
        Self(self.0.with_coupled_q(q))
    }

    fn __repr__(&self) -> String {
        let p = &self.0;
        format!(
            "Cavity(omega_c={}, omega_e={}, g={}, v_r={}, v_l={}, kappa={}, gamma={})",
            p.omega_c, p.omega_e, p.g, p.v_r, p.v_l, p.kappa, p.gamma
        )
    }
}

/// Ordered cavity chain; `separations[i]` sits between cavities `i` and `i + 1`.
#[pyclass(name = "Layout", module = "photon_switch", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLayout(core::SwitchLayout);

#[pymethods]
impl PyLayout {
    #[new]
    #[pyo3(signature = (cavities, separations, v_g))]
    fn new(cavities: Vec<PyRef<'_, PyCavity>>, separations: Vec<f64>, v_g: f64) -> Self {
        Self(core::SwitchLayout {
            cavities: cavities.iter().map(|c| c.0).collect(),
            links: separations.into_iter().map(|d| core::WaveguideLink { d }).collect(),
            v_g,
        })
    }

    /// `n` copies of `cavity`, all separations `d`.
    #[staticmethod]
    fn identical(cavity: PyRef<'_, PyCavity>, n: usize, d: f64, v_g: f64) -> Self {
        Self(core::SwitchLayout::identical(cavity.0, n, d, v_g))
    }

    /// Raises ValueError listing every invalid field.
    fn validate(&self) -> PyResult<()> {
        self.0.validate().map_err(to_py)
    }

    #[getter]
    fn cavities(&self) -> Vec<PyCavity> {
        self.0.cavities.iter().copied().map(PyCavity).collect()
    }

    #[getter]
    fn separations(&self) -> Vec<f64> {
        self.0.links.iter().map(|l| l.d).collect()
    }

    #[getter]
    fn v_g(&self) -> f64 {
        self.0.v_g
    }

    fn reversed(&self) -> Self {
        Self(self.0.reversed())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Layout(n={}, v_g={})", self.0.len(), self.0.v_g)
    }
}

/// Gaussian packet; `sigma_lambda` is the intensity FWHM in wavelength.
#[pyclass(name = "WavePacket", module = "photon_switch", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyWavePacket(core::WavePacketSpec);

#[pymethods]
impl PyWavePacket {
    #[new]
    fn new(lambda_cen: f64, sigma_lambda: f64) -> PyResult<Self> {
        core::WavePacketSpec::new(lambda_cen, sigma_lambda).map(Self).map_err(to_py)
    }

    #[getter]
    fn omega_cen(&self) -> f64 {
        self.0.omega_cen()
    }

    #[getter]
    fn sigma_omega(&self) -> f64 {
        self.0.sigma_omega()
    }

    /// Intensity FWHM in time, s.
    #[getter]
    fn duration(&self) -> f64 {
        self.0.intensity_fwhm_duration()
    }
}

/// `(t, r)` at angular frequency `omega`.
#[pyfunction]
fn scattering(layout: PyRef<'_, PyLayout>, omega: f64) -> PyResult<(Complex64, Complex64)> {
    core::scattering(&layout.0, omega).map_err(to_py)
}

/// `(t, r)` of an identical, equally spaced chain from the closed form.
#[pyfunction]
fn chain_scattering(
    cavity: PyRef<'_, PyCavity>,
    n: usize,
    d: f64,
    v_g: f64,
    omega: f64,
) -> PyResult<(Complex64, Complex64)> {
    core::chain_scattering(&core::IdenticalChainParams { cavity: cavity.0, d, v_g, n }, omega).map_err(to_py)
}

/// Spectrum on a uniform grid as a dict of lists.
#[pyfunction]
#[pyo3(signature = (layout, start, stop, points, axis = "wavelength_nm"))]
fn spectrum<'py>(
    py: Python<'py>,
    layout: PyRef<'_, PyLayout>,
    start: f64,
    stop: f64,
    points: usize,
    axis: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let grid = core::SpectralGrid { axis: parse_axis(axis)?, start, stop, points };
    let s = core::compute_spectrum(&layout.0, &grid).map_err(to_py)?;
    spectrum_dict(py, &s)
}

fn spectrum_dict<'py>(py: Python<'py>, s: &core::ScatteringSpectrum) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("axis", s.axis_values())?;
    d.set_item("omega", s.samples.iter().map(|p| p.omega).collect::<Vec<_>>())?;
    d.set_item("transmission", s.transmission())?;
    d.set_item("reflection", s.samples.iter().map(|p| p.reflection).collect::<Vec<_>>())?;
    d.set_item("loss", s.samples.iter().map(|p| p.loss).collect::<Vec<_>>())?;
    d.set_item("t", s.samples.iter().map(|p| p.t).collect::<Vec<_>>())?;
    d.set_item("r", s.samples.iter().map(|p| p.r).collect::<Vec<_>>())?;
    Ok(d)
}

/// Efficiency, fidelity and routing probability for `mode`.
#[pyfunction]
fn switch_metrics<'py>(
    py: Python<'py>,
    layout: PyRef<'_, PyLayout>,
    packet: PyRef<'_, PyWavePacket>,
    mode: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let m = core::switch_metrics(&layout.0, &packet.0, parse_mode(mode)?).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("mode", mode)?;
    d.set_item("efficiency", m.efficiency)?;
    d.set_item("fidelity", m.fidelity)?;
    d.set_item("routing_probability", m.routing_probability)?;
    Ok(d)
}

/// Twice the summed separations over `v_g`, s.
#[pyfunction]
fn round_trip_time(layout: PyRef<'_, PyLayout>) -> f64 {
    core::round_trip_time(&layout.0)
}

/// Realization-averaged spectrum with Gaussian disorder in `target`.
/// Wavelengths and separations in m.
#[pyfunction]
#[pyo3(signature = (layout, target, mean, sigma, realizations, seed, start, stop, points, keep_samples = 0))]
#[allow(clippy::too_many_arguments)]
fn disorder_study<'py>(
    py: Python<'py>,
    layout: PyRef<'_, PyLayout>,
    target: &str,
    mean: f64,
    sigma: f64,
    realizations: usize,
    seed: u64,
    start: f64,
    stop: f64,
    points: usize,
    keep_samples: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = core::DisorderSpec { target: parse_target(target)?, mean, sigma, realizations, seed };
    let grid = core::SpectralGrid::wavelength_nm(start, stop, points);
    let base = layout.0.clone();
    let result = py.detach(|| core::disorder_study(&base, &spec, &grid, keep_samples)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("mean", spectrum_dict(py, &result.mean_spectrum)?)?;
    d.set_item("samples", result.sample_spectra.iter().map(|s| s.transmission()).collect::<Vec<_>>())?;
    d.set_item("parameters", result.realized_parameters)?;
    d.set_item("failed", result.failed_realizations)?;
    d.set_item("seed", result.seed)?;
    Ok(d)
}

/// Applies `action` ("weak_coupling", "decouple" or "detune_to") to cavity `index`.
#[pyfunction]
#[pyo3(signature = (layout, index, action, wavelength = None))]
fn mitigate(layout: PyRef<'_, PyLayout>, index: usize, action: &str, wavelength: Option<f64>) -> PyResult<PyLayout> {
    let action = match (action, wavelength) {
        ("weak_coupling", None) => Mitigation::WeakCoupling,
        ("decouple", None) => Mitigation::Decouple,
        ("detune_to", Some(l)) => Mitigation::DetuneTo(l),
        _ => {
            return Err(PyValueError::new_err(
                "action is 'weak_coupling', 'decouple', or 'detune_to' with a wavelength",
            ))
        }
    };
    core::mitigation_scenario(&layout.0, index, action).map(PyLayout).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "photon_switch")]
fn photon_switch_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SPEED_OF_LIGHT", core::SPEED_OF_LIGHT)?;
    m.add_class::<PyCavity>()?;
    m.add_class::<PyLayout>()?;
    m.add_class::<PyWavePacket>()?;
    m.add_function(wrap_pyfunction!(scattering, m)?)?;
    m.add_function(wrap_pyfunction!(chain_scattering, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(switch_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(round_trip_time, m)?)?;
    m.add_function(wrap_pyfunction!(disorder_study, m)?)?;
    m.add_function(wrap_pyfunction!(mitigate, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_parse_and_reject_unknowns() {
        assert_eq!(parse_mode("reflection").unwrap(), Mode::Reflection);
        assert_eq!(parse_axis("omega_rad_s").unwrap(), GridAxis::FrequencyRadS);
        assert_eq!(parse_target("coupled_q").unwrap(), DisorderTarget::CoupledQ);
        Python::initialize();
        assert!(parse_mode("sideways").is_err());
        assert!(parse_target("g").is_err());
    }

    #[test]
    fn errors_map_to_python_exception_types() {
        Python::initialize();
        Python::attach(|py| {
            let e = to_py(core::Error::InvalidParameter("x".into()));
            assert!(e.is_instance_of::<PyValueError>(py));
            let e = to_py(core::Error::IndexOutOfRange { index: 3, len: 1 });
            assert!(e.is_instance_of::<PyIndexError>(py));
            let e = to_py(core::Error::DegenerateOutput { omega: 1.0 });
            assert!(e.is_instance_of::<PyArithmeticError>(py));
        });
    }
}
