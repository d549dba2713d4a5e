//! Python bindings: `bshear.System`, `bshear.cartoon` and `bshear.run_experiment`.

use std::path::PathBuf;
use std::sync::Arc;

use ::bshear::config::RunConfig;
use ::bshear::experiments::{self, ExperimentKind, Systems};
use ::bshear::hybrid::BoundaryShearletSystem;
use ::bshear::linalg::{extremal_eigenvalues_with, CgSolver, EigenOptions, FnOperator};
use ::bshear::Error;
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyIOError::new_err(io.to_string()),
        e if e.is_numerical() => PyRuntimeError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

/// Hybrid system of boundary wavelets and interior shearlets at one offset `t`.
#[pyclass(frozen, module = "bshear")]
struct System {
    sys: Arc<Systems>,
    bss: BoundaryShearletSystem,
    cfg: RunConfig,
}

#[pymethods]
impl System {
    #[new]
    #[pyo3(signature = (n = 64, scales = 3, wavelet = "db4", t = 0.0, tau = 1.0 / 3.0, cache_dir = None))]
    fn new(n: usize, scales: u32, wavelet: &str, t: f64, tau: f64, cache_dir: Option<PathBuf>) -> PyResult<Self> {
        let cfg = RunConfig {
            n,
            scales,
            wavelet: wavelet.parse().map_err(py_err)?,
            tau,
            offsets: vec![t],
            cache_dir,
            ..Default::default()
        };
        let sys = Arc::new(Systems::build(&cfg).map_err(py_err)?);
        let bss = sys.at(t).map_err(py_err)?;
        Ok(Self { sys, bss, cfg })
    }

    /// Same subsystems at another offset.
    fn with_offset(&self, t: f64) -> PyResult<Self> {
        let bss = self.sys.at(t).map_err(py_err)?;
        Ok(Self { sys: self.sys.clone(), bss, cfg: RunConfig { offsets: vec![t], ..self.cfg.clone() } })
    }

    #[getter]
    fn n(&self) -> usize {
        self.bss.n()
    }

    #[getter]
    fn t(&self) -> f64 {
        self.bss.config().t
    }

    #[getter]
    fn wavelet_count(&self) -> usize {
        self.bss.wavelet_count()
    }

    #[getter]
    fn shearlet_count(&self) -> usize {
        self.bss.shearlet_count()
    }

    #[getter]
    fn q_sh(&self) -> f64 {
        self.sys.shearlets.q_sh()
    }

    fn __len__(&self) -> usize {
        self.bss.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "System(n={}, t={}, wavelets={}, shearlets={})",
            self.bss.n(),
            self.bss.config().t,
            self.bss.wavelet_count(),
            self.bss.shearlet_count()
        )
    }

    /// Stacked coefficients `[wavelets in Θ, shearlets in Λ₀]` of a row-major grid.
    fn analysis(&self, f: Vec<f64>) -> PyResult<Vec<f64>> {
        self.bss.analysis_stacked(&f).map_err(py_err)
    }

    fn synthesis(&self, c: Vec<f64>) -> PyResult<Vec<f64>> {
        self.bss.synthesis_stacked(&c).map_err(py_err)
    }

    fn frame_apply(&self, f: Vec<f64>) -> PyResult<Vec<f64>> {
        self.bss.frame_operator_apply(&f).map_err(py_err)
    }

    /// Dual-frame reconstruction by CG; returns `(grid, iterations, residual)`.
    #[pyo3(signature = (c, tol = 1e-8, max_iter = 5000))]
    fn reconstruct(&self, c: Vec<f64>, tol: f64, max_iter: usize) -> PyResult<(Vec<f64>, usize, f64)> {
        let n = self.bss.n();
        let op = FnOperator::symmetric(n * n, |x| self.bss.frame_operator_apply(x));
        let solver = CgSolver::new(&op, tol, max_iter).map_err(py_err)?;
        let rhs = self.bss.synthesis_stacked(&c).map_err(py_err)?;
        let out = solver.solve(&rhs).map_err(py_err)?;
        Ok((out.x, out.iterations, out.residual))
    }

    /// `(λ_min, λ_max)` of the frame operator.
    #[pyo3(signature = (tol = 1e-4, seed = 0))]
    fn frame_bounds(&self, tol: f64, seed: u64) -> PyResult<(f64, f64)> {
        let n = self.bss.n();
        let op = FnOperator::symmetric(n * n, |x| self.bss.frame_operator_apply(x));
        let est = extremal_eigenvalues_with(&op, &EigenOptions { seed, ..EigenOptions::new(tol) }).map_err(py_err)?;
        Ok((est.lambda_min, est.lambda_max))
    }

    /// Scale of every stacked coefficient.
    fn scales(&self) -> Vec<u32> {
        self.bss.scales().to_vec()
    }

    fn sobolev_weights(&self, s: f64) -> PyResult<Vec<f64>> {
        self.bss.sobolev_weights(s).map_err(py_err)
    }

    /// Orthonormal transform of the full wavelet basis.
    fn wavelet_analysis(&self, f: Vec<f64>) -> PyResult<Vec<f64>> {
        self.sys.wavelets.analysis(&f).map_err(py_err)
    }

    fn wavelet_synthesis(&self, c: Vec<f64>) -> PyResult<Vec<f64>> {
        self.sys.wavelets.synthesis(&c).map_err(py_err)
    }
}

/// Raster of a random cartoon image.
#[pyfunction]
#[pyo3(signature = (n, nu = 40.0, seed = 7, crossings = 2))]
fn cartoon(n: usize, nu: f64, seed: u64, crossings: usize) -> PyResult<Vec<f64>> {
    let mut cfg = RunConfig { n, ..Default::default() };
    cfg.cartoon.nu = nu;
    cfg.cartoon.seed = seed;
    cfg.cartoon.crossings = crossings;
    experiments::cartoon_grid(&cfg).map_err(py_err)
}

/// Run an experiment from a TOML configuration; returns a dict with
/// `columns`, `rows`, `labels`, `errors` and `metadata`.
#[pyfunction]
#[pyo3(signature = (kind, config = ""))]
fn run_experiment<'py>(py: Python<'py>, kind: &str, config: &str) -> PyResult<Bound<'py, PyDict>> {
    let kind: ExperimentKind = kind.parse().map_err(py_err)?;
    let cfg: RunConfig = toml::from_str(config).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let report = experiments::run(kind, &cfg).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("kind", kind.to_string())?;
    out.set_item("columns", report.columns.clone())?;
    out.set_item("rows", report.rows.iter().map(|r| r.values.clone()).collect::<Vec<_>>())?;
    out.set_item("labels", report.rows.iter().map(|r| r.label.clone()).collect::<Vec<_>>())?;
    out.set_item("errors", report.rows.iter().map(|r| r.error.clone()).collect::<Vec<_>>())?;
    let meta = PyDict::new(py);
    for (k, v) in &report.metadata {
        meta.set_item(k, v)?;
    }
    out.set_item("metadata", meta)?;
    Ok(out)
}

#[pymodule]
#[pyo3(name = "bshear")]
fn bshear_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<System>()?;
    m.add_function(wrap_pyfunction!(cartoon, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
