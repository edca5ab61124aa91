//! Python bindings: problem construction, evaluation, Pareto utilities,
//! change classification, the baseline optimiser and the scenario runner.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use dynmo_core::analysis::{self, order_of};
use dynmo_core::dynamics::DynamicProblem;
use dynmo_core::optimizer::{self, EaConfig};
use dynmo_core::pareto::{self, Grid, DEFAULT_GRID_BUDGET};
use dynmo_core::problems::{
    self, Dependency, DswConfig, Dtlz2DynConfig, GMode, GSchedule, MnkConfig, Neighborhood,
    PeakSet, WalkSeverity,
};
use dynmo_core::scenario::{self, Scenario};
use dynmo_core::{Bounds, Error, Rng};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn bad(message: impl Into<String>) -> PyErr {
    PyValueError::new_err(message.into())
}

/// A dynamic multi-objective problem with its own advance stream.
#[pyclass(module = "dynmo")]
struct Problem {
    inner: DynamicProblem,
    rng: Rng,
}

impl Problem {
    fn wrap(inner: DynamicProblem, seed: u64) -> Self {
        Self {
            inner,
            rng: Rng::substream(seed, "python-advance"),
        }
    }
}

#[pymethods]
impl Problem {
    #[staticmethod]
    #[pyo3(signature = (n=2, a11=1.0, a12=0.0, a21=1.0, a22=0.0, b1=1.0, b2=1.0, s=1.0, period=10, corrected=false, lower=-5.0, upper=5.0))]
    #[allow(clippy::too_many_arguments)]
    fn dsw(
        n: usize,
        a11: f64,
        a12: f64,
        a21: f64,
        a22: f64,
        b1: f64,
        b2: f64,
        s: f64,
        period: u64,
        corrected: bool,
        lower: f64,
        upper: f64,
    ) -> PyResult<Self> {
        let cfg = DswConfig {
            a11,
            a12,
            a21,
            a22,
            b1,
            b2,
            n,
            s,
            period,
            t0: 0.0,
            corrected,
            lower,
            upper,
        };
        Ok(Self::wrap(problems::dsw_make(cfg).map_err(to_py)?, 0))
    }

    #[staticmethod]
    #[pyo3(signature = (k=2, p=1, g_mode="one-plus-g", g_values=None, severity=0.1, period=10))]
    fn dtlz2_dynamic(
        k: usize,
        p: usize,
        g_mode: &str,
        g_values: Option<Vec<f64>>,
        severity: f64,
        period: u64,
    ) -> PyResult<Self> {
        let g_mode = match g_mode {
            "one-plus-g" => GMode::OnePlusG,
            "product" => GMode::PaperProduct,
            _ => return Err(bad("g_mode must be 'one-plus-g' or 'product'")),
        };
        let schedule = match g_values {
            Some(values) => GSchedule::Table(values),
            None => GSchedule::Steps { severity },
        };
        let cfg = Dtlz2DynConfig {
            k,
            p,
            g_mode,
            schedule,
            period,
            t0: 0.0,
        };
        Ok(Self::wrap(problems::dtlz2_dynamic_make(cfg).map_err(to_py)?, 0))
    }

    #[staticmethod]
    #[pyo3(signature = (n=2, peaks=5, lower=0.0, upper=100.0, dependency="state-param", window=2, walk_height=7.0, walk_width=1.0, walk_location=1.0, seed=1))]
    #[allow(clippy::too_many_arguments)]
    fn moving_peaks(
        n: usize,
        peaks: usize,
        lower: f64,
        upper: f64,
        dependency: &str,
        window: usize,
        walk_height: f64,
        walk_width: f64,
        walk_location: f64,
        seed: u64,
    ) -> PyResult<Self> {
        let dependency = match dependency {
            "state-param" => Dependency::StateParam,
            "state-func" => Dependency::StateFunc,
            _ => return Err(bad("dependency must be 'state-param' or 'state-func'")),
        };
        let walk = WalkSeverity {
            height: walk_height,
            width: walk_width,
            location: walk_location,
        };
        let bounds = Bounds::uniform(n, lower, upper).map_err(to_py)?;
        let set = PeakSet::random(peaks, bounds, walk, &mut Rng::substream(seed, "moving-peaks"))
            .map_err(to_py)?;
        let problem = problems::moving_peaks_make(set, dependency, window).map_err(to_py)?;
        Ok(Self::wrap(problem, seed))
    }

    #[staticmethod]
    #[pyo3(signature = (objectives=2, bits=12, epistasis=2, rho=0.1, neighborhood="random", period=10, seed=1))]
    fn mnk(
        objectives: usize,
        bits: usize,
        epistasis: usize,
        rho: f64,
        neighborhood: &str,
        period: u64,
        seed: u64,
    ) -> PyResult<Self> {
        let neighborhood = match neighborhood {
            "random" => Neighborhood::Random,
            "adjacent" => Neighborhood::Adjacent,
            _ => return Err(bad("neighborhood must be 'random' or 'adjacent'")),
        };
        let cfg = MnkConfig {
            objectives,
            bits,
            epistasis,
            rho,
            neighborhood,
            period,
        };
        Ok(Self::wrap(problems::mnk_make(cfg, seed).map_err(to_py)?, seed))
    }

    #[staticmethod]
    #[pyo3(signature = (n=2, lower=-5.0, upper=5.0))]
    fn two_sphere(n: usize, lower: f64, upper: f64) -> PyResult<Self> {
        Ok(Self::wrap(problems::two_sphere_make(n, lower, upper).map_err(to_py)?, 0))
    }

    /// Builds the problem described by scenario text.
    #[staticmethod]
    fn from_scenario(text: &str) -> PyResult<Self> {
        let s = Scenario::parse(text).map_err(to_py)?;
        Ok(Self::wrap(s.build_problem().map_err(to_py)?, s.seed))
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    /// Where the dynamics enter, e.g. `"first"` or `"third-param"`.
    #[getter]
    fn order(&self) -> &'static str {
        self.inner.order().as_str()
    }

    /// `(kind, correlation)`, e.g. `("first order", "independent")`.
    #[getter]
    fn order_class(&self) -> (String, String) {
        let c = order_of(&self.inner);
        (c.kind.to_string(), c.correlation.to_string())
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    #[getter]
    fn objectives(&self) -> usize {
        self.inner.objectives()
    }

    #[getter]
    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let b = self.inner.bounds();
        (b.lower().to_vec(), b.upper().to_vec())
    }

    #[getter]
    fn step(&self) -> u64 {
        self.inner.step()
    }

    #[getter]
    fn current_time(&self) -> f64 {
        self.inner.current_time()
    }

    /// Objectives at `x`; `t` defaults to the current time.
    #[pyo3(signature = (x, t=None))]
    fn evaluate(&self, x: Vec<f64>, t: Option<f64>) -> PyResult<Vec<f64>> {
        let t = t.unwrap_or_else(|| self.inner.current_time());
        Ok(self.inner.evaluate(&x, t).map_err(to_py)?.into_inner())
    }

    /// Moves to the next change step.
    fn advance(&mut self) -> PyResult<()> {
        self.inner.advance(&mut self.rng).map_err(to_py)
    }

    #[pyo3(signature = (t, points=100))]
    fn reference_front(&self, t: f64, points: usize) -> Option<Vec<Vec<f64>>> {
        self.inner
            .reference_front(t, points)
            .map(|f| f.into_iter().map(|v| v.into_inner()).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(name={:?}, order={:?}, n={}, k={}, step={})",
            self.inner.name(),
            self.inner.order().as_str(),
            self.inner.dimension(),
            self.inner.objectives(),
            self.inner.step()
        )
    }
}

#[pyfunction]
fn dominates(u: Vec<f64>, v: Vec<f64>) -> PyResult<bool> {
    pareto::dominates(&u, &v).map_err(to_py)
}

/// Ascending indices of the non-dominated points.
#[pyfunction]
fn non_dominated_filter(points: Vec<Vec<f64>>) -> PyResult<Vec<usize>> {
    pareto::non_dominated_filter(&points).map_err(to_py)
}

fn snapshot_dict<'py>(py: Python<'py>, snap: &pareto::FrontSnapshot) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("t", snap.t)?;
    d.set_item(
        "pos",
        snap.pos.iter().map(|x| x.to_vec()).collect::<Vec<_>>(),
    )?;
    d.set_item(
        "pof",
        snap.pof.iter().map(|f| f.to_vec()).collect::<Vec<_>>(),
    )?;
    Ok(d)
}

fn make_grid(grid: usize, budget: Option<u64>) -> Grid {
    Grid::uniform(grid).with_budget(budget.unwrap_or(DEFAULT_GRID_BUDGET))
}

/// Grid oracle: `{"t", "pos", "pof"}` at time `t`.
#[pyfunction]
#[pyo3(signature = (problem, t, grid=101, budget=None))]
fn brute_force_front<'py>(
    py: Python<'py>,
    problem: &Problem,
    t: f64,
    grid: usize,
    budget: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let snap = pareto::brute_force_front(&problem.inner, t, &make_grid(grid, budget)).map_err(to_py)?;
    snapshot_dict(py, &snap)
}

/// `"Type I"` to `"Type IV"`; `eps` defaults to twice the cell diagonal.
#[pyfunction]
#[pyo3(signature = (problem, times, grid=101, eps=None, budget=None))]
fn classify_change_type(
    problem: &Problem,
    times: Vec<f64>,
    grid: usize,
    eps: Option<f64>,
    budget: Option<u64>,
) -> PyResult<String> {
    let grid = make_grid(grid, budget);
    let eps = match eps {
        Some(e) => e,
        None => analysis::default_eps(&problem.inner, &grid).map_err(to_py)?,
    };
    let ty = analysis::classify_change_type(&problem.inner, &times, &grid, eps).map_err(to_py)?;
    Ok(ty.to_string())
}

#[pyfunction]
fn igd(approx: Vec<Vec<f64>>, reference: Vec<Vec<f64>>) -> PyResult<f64> {
    analysis::igd(&approx, &reference).map_err(to_py)
}

/// `(volume, excluded)`; `excluded` counts points not dominating `reference`.
#[pyfunction]
fn hypervolume_2d(front: Vec<Vec<f64>>, reference: Vec<f64>) -> PyResult<(f64, usize)> {
    let hv = analysis::hypervolume_2d(&front, &reference).map_err(to_py)?;
    Ok((hv.volume, hv.excluded))
}

/// Runs the baseline optimiser; returns one dict per generation.
#[pyfunction]
#[pyo3(signature = (problem, budget, mu=100, generations_per_step=None, seed=0, hv_ref=None))]
fn run_dynamic_ea<'py>(
    py: Python<'py>,
    problem: &mut Problem,
    budget: u64,
    mu: usize,
    generations_per_step: Option<u64>,
    seed: u64,
    hv_ref: Option<Vec<f64>>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let period = generations_per_step.unwrap_or(problem.inner.time_model().period);
    let mut cfg = EaConfig::new(budget, mu, period);
    cfg.hv_reference = hv_ref;
    let timeline = optimizer::run_dynamic_ea(&mut problem.inner, &cfg, &mut Rng::substream(seed, "optimizer"))
        .map_err(to_py)?;
    timeline
        .records
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("tau", r.tau)?;
            d.set_item("t", r.t)?;
            d.set_item("evaluations", r.evaluations)?;
            d.set_item("change_detected", r.change_detected)?;
            d.set_item("igd", r.igd)?;
            d.set_item("hv", r.hv)?;
            d.set_item("archive", snapshot_dict(py, &r.archive)?)?;
            Ok(d)
        })
        .collect()
}

/// Validates scenario text and returns its canonical resolved form.
#[pyfunction]
fn parse_scenario(text: &str) -> PyResult<String> {
    Ok(Scenario::parse(text).map_err(to_py)?.to_text())
}

/// Runs scenario text, writing artifacts to `out` (or the scenario's `out`).
#[pyfunction]
#[pyo3(signature = (text, out=None))]
fn run_scenario<'py>(py: Python<'py>, text: &str, out: Option<PathBuf>) -> PyResult<Bound<'py, PyDict>> {
    let s = Scenario::parse(text).map_err(to_py)?;
    let summary = scenario::run_scenario(&s, out.as_deref()).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("out_dir", summary.out_dir)?;
    d.set_item("files", summary.files)?;
    d.set_item("order", summary.order.kind.to_string())?;
    d.set_item("correlation", summary.order.correlation.to_string())?;
    d.set_item("change_type", summary.change_type.map(|t| t.to_string()))?;
    d.set_item("final_igd", summary.final_igd)?;
    Ok(d)
}

#[pyfunction]
fn list_problems() -> Vec<&'static str> {
    problems::PROBLEM_NAMES.to_vec()
}

#[pymodule]
fn dynmo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_function(wrap_pyfunction!(dominates, m)?)?;
    m.add_function(wrap_pyfunction!(non_dominated_filter, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_front, m)?)?;
    m.add_function(wrap_pyfunction!(classify_change_type, m)?)?;
    m.add_function(wrap_pyfunction!(igd, m)?)?;
    m.add_function(wrap_pyfunction!(hypervolume_2d, m)?)?;
    m.add_function(wrap_pyfunction!(run_dynamic_ea, m)?)?;
    m.add_function(wrap_pyfunction!(parse_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(list_problems, m)?)?;
    Ok(())
}
