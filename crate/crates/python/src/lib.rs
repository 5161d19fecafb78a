//! Python bindings. Built as the `wigson` extension module with the
//! `extension-module` feature.

use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use wigson::analysis::{compute_moments, MomentSet};
use wigson::config::MapConfig;
use wigson::grid::{coverage, sample_field, GridSpec, WignerField};
use wigson::render::{
    read_wav, render_sweep, stft_sonogram, synth, write_wav, SweepTrajectory, DEFAULT_FRAME, DEFAULT_SAMPLE_RATE,
};
use wigson::score::{bank_to_events, partial_gains, write_score};
use wigson::sonify::{method1_grid, method2_extremes, method3_sections, method4_moments, quantize_quarter_tone, Method};
use wigson::wigner::{PhasePoint, StateSpec, Wavefunction, DEFAULT_PSI_NODES, DEFAULT_PSI_SPAN};
use wigson::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn config(path: Option<PathBuf>) -> PyResult<MapConfig> {
    match path {
        Some(p) => MapConfig::read(&p).map_err(py_err),
        None => Ok(MapConfig::default()),
    }
}

/// A quantum state, parsed from `fock:<m>`, `cat:<re[,im]>[@<re[,im]>]`,
/// `coherent:<re[,im]>` or `psi:<csv-path>`.
#[pyclass(name = "State", frozen)]
struct PyState(StateSpec);

#[pymethods]
impl PyState {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        StateSpec::parse(spec).map(PyState).map_err(py_err)
    }

    /// Sampled oscillator eigenstate, evaluated through the numeric transform.
    #[staticmethod]
    #[pyo3(signature = (m, span = DEFAULT_PSI_SPAN, nodes = DEFAULT_PSI_NODES))]
    fn eigenstate(m: u32, span: f64, nodes: usize) -> PyResult<Self> {
        let psi = Wavefunction::oscillator_eigenstate(m, span, nodes).map_err(py_err)?;
        Ok(PyState(StateSpec::numeric(psi)))
    }

    fn evaluate(&self, r: f64, p: f64) -> PyResult<f64> {
        self.0.evaluate(PhasePoint::new(r, p)).map_err(py_err)
    }

    fn frame_center(&self) -> (f64, f64) {
        let c = self.0.frame_center();
        (c.r, c.p)
    }

    /// Samples on `grid` (`regular:n:min:max` or `gauss:n:span`), or the default 64×64 grid.
    #[pyo3(signature = (grid = None))]
    fn sample(&self, grid: Option<&str>) -> PyResult<PyField> {
        let spec = match grid {
            Some(g) => GridSpec::parse(g, &self.0),
            None => GridSpec::default_for(&self.0),
        }
        .map_err(py_err)?;
        sample_field(&self.0, &spec).map(PyField).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("State('{}')", self.0)
    }
}

/// A state sampled at the cell centres of a grid.
#[pyclass(name = "Field", frozen)]
struct PyField(WignerField);

#[pymethods]
impl PyField {
    #[staticmethod]
    fn read_csv(path: PathBuf) -> PyResult<Self> {
        WignerField::read_csv(&path).map(PyField).map_err(py_err)
    }

    fn write_csv(&self, path: PathBuf) -> PyResult<()> {
        self.0.write_csv(&path).map_err(py_err)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.grid().n_r(), self.0.grid().n_p())
    }

    #[getter]
    fn r_edges(&self) -> Vec<f64> {
        self.0.grid().r_edges().to_vec()
    }

    #[getter]
    fn p_edges(&self) -> Vec<f64> {
        self.0.grid().p_edges().to_vec()
    }

    /// Row-major values, one row per r cell.
    fn values(&self) -> Vec<Vec<f64>> {
        self.0.values().chunks(self.0.grid().n_p()).map(<[f64]>::to_vec).collect()
    }

    fn coverage(&self) -> PyResult<f64> {
        coverage(&self.0).map_err(py_err)
    }

    fn moments(&self) -> PyResult<PyMoments> {
        compute_moments(&self.0).map(PyMoments).map_err(py_err)
    }

    /// Partials of one sonification method as `(freq, amp, phase)` tuples.
    #[pyo3(signature = (method, duration = 10.0, config_path = None))]
    fn partials(&self, method: &str, duration: f64, config_path: Option<PathBuf>) -> PyResult<Vec<(f64, f64, f64)>> {
        let cfg = config(config_path)?;
        let bank = bank(&self.0, method, duration, &cfg)?;
        Ok(bank.partials.iter().map(|p| (p.freq, p.amp, p.phase)).collect())
    }

    /// Renders one method to a WAV file; optionally writes the score JSON too.
    #[pyo3(signature = (method, path, duration = 10.0, channels = 1, score_path = None, config_path = None, sample_rate = DEFAULT_SAMPLE_RATE))]
    #[allow(clippy::too_many_arguments)]
    fn sonify(
        &self,
        method: &str,
        path: PathBuf,
        duration: f64,
        channels: usize,
        score_path: Option<PathBuf>,
        config_path: Option<PathBuf>,
        sample_rate: u32,
    ) -> PyResult<()> {
        let cfg = config(config_path)?;
        wigson::grid::require_coverage(&self.0).map_err(py_err)?;
        let bank = bank(&self.0, method, duration, &cfg)?;
        let gains = partial_gains(&bank, &self.0, channels).map_err(py_err)?;
        let audio = synth(&bank, sample_rate, &gains).map_err(py_err)?;
        write_wav(&audio, &path).map_err(py_err)?;
        if let Some(score) = score_path {
            let events = bank_to_events(&bank, &self.0, &cfg, channels, false).map_err(py_err)?;
            write_score(&events, &score).map_err(py_err)?;
        }
        Ok(())
    }
}

fn bank(field: &WignerField, method: &str, duration: f64, cfg: &MapConfig) -> PyResult<wigson::PartialBank> {
    let method: Method = method.parse().map_err(py_err)?;
    match method {
        Method::I => method1_grid(field, cfg, duration),
        Method::II => method2_extremes(field, cfg, duration),
        Method::III => method3_sections(field, cfg, duration),
        Method::IV => compute_moments(field).and_then(|m| method4_moments(&m, cfg, duration)),
    }
    .map_err(py_err)
}

#[pyclass(name = "Moments", frozen)]
struct PyMoments(MomentSet);

#[pymethods]
impl PyMoments {
    #[getter]
    fn r0(&self) -> f64 {
        self.0.r0
    }
    #[getter]
    fn p0(&self) -> f64 {
        self.0.p0
    }
    #[getter]
    fn sigma_r(&self) -> f64 {
        self.0.sigma_r
    }
    #[getter]
    fn sigma_p(&self) -> f64 {
        self.0.sigma_p
    }
    #[getter]
    fn skew_r(&self) -> f64 {
        self.0.skew_r
    }
    #[getter]
    fn skew_p(&self) -> f64 {
        self.0.skew_p
    }
    #[getter]
    fn kurt_r(&self) -> f64 {
        self.0.kurt_r
    }
    #[getter]
    fn kurt_p(&self) -> f64 {
        self.0.kurt_p
    }
    #[getter]
    fn negativity(&self) -> f64 {
        self.0.negativity
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }
}

#[pyfunction]
fn eval_fock(m: u32, r: f64, p: f64) -> f64 {
    wigson::wigner::eval_fock(m, PhasePoint::new(r, p))
}

#[pyfunction]
fn eval_cat(delta_alpha: Complex64, r: f64, p: f64) -> PyResult<f64> {
    wigson::wigner::eval_cat(delta_alpha, PhasePoint::new(r, p)).map_err(py_err)
}

#[pyfunction]
fn eval_coherent(alpha: Complex64, r: f64, p: f64) -> f64 {
    wigson::wigner::eval_coherent(alpha, PhasePoint::new(r, p))
}

#[pyfunction]
#[pyo3(signature = (freq, ref_pitch = 440.0))]
fn quantize(freq: f64, ref_pitch: f64) -> f64 {
    quantize_quarter_tone(freq, ref_pitch)
}

/// Renders a δα sweep to WAV and returns the per-frame `(time, f0, sigma_f)`.
#[pyfunction]
#[pyo3(signature = (path, trajectory = None, frame = DEFAULT_FRAME, sample_rate = DEFAULT_SAMPLE_RATE, config_path = None))]
fn sweep(
    py: Python<'_>,
    path: PathBuf,
    trajectory: Option<&str>,
    frame: f64,
    sample_rate: u32,
    config_path: Option<PathBuf>,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let cfg = config(config_path)?;
    let traj = match trajectory {
        Some(t) => SweepTrajectory::parse(t).map_err(py_err)?,
        None => SweepTrajectory::default_path(),
    };
    let render = py
        .detach(|| render_sweep(&traj, &cfg, frame, sample_rate))
        .map_err(py_err)?;
    write_wav(&render.audio, &path).map_err(py_err)?;
    Ok(render.frames.iter().map(|f| (f.time, f.f0, f.sigma_f)).collect())
}

/// Writes the STFT magnitude matrix of a WAV file as CSV; returns (frames, bins).
#[pyfunction]
fn sonogram(wav: PathBuf, out: PathBuf) -> PyResult<(usize, usize)> {
    let s = stft_sonogram(&read_wav(&wav).map_err(py_err)?).map_err(py_err)?;
    s.write_csv(&out).map_err(py_err)?;
    Ok((s.frame_count(), s.bin_count()))
}

#[pymodule]
#[pyo3(name = "wigson")]
fn wigson_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}

/// Adds every class and function to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyMoments>()?;
    m.add_function(wrap_pyfunction!(eval_fock, m)?)?;
    m.add_function(wrap_pyfunction!(eval_cat, m)?)?;
    m.add_function(wrap_pyfunction!(eval_coherent, m)?)?;
    m.add_function(wrap_pyfunction!(quantize, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(sonogram, m)?)?;
    Ok(())
}
