//! Flat `key = value` scenario files: parsing, defaults, validation and a
//! canonical text form that parses back to the same scenario.
//!
//! Lines are `key = value`; `#` starts a comment. Unknown keys, duplicate
//! keys and keys belonging to another problem are errors.

mod run;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dynamics::DynamicProblem;
use crate::error::{Error, Result};
use crate::problems::{
    dsw_make, dtlz2_dynamic_make, mnk_make, moving_peaks_make, two_sphere_make, Dependency,
    DswConfig, Dtlz2DynConfig, GMode, GSchedule, MnkConfig, Neighborhood, PeakSet, WalkSeverity,
    PROBLEM_NAMES,
};
use crate::rng::Rng;
use crate::time::TimeModel;
use crate::types::Bounds;

pub use run::{run_scenario, RunSummary, OUT_DIR_ENV};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Analyze,
    Optimize,
    Both,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Analyze => "analyze",
            Mode::Optimize => "optimize",
            Mode::Both => "both",
        }
    }

    pub fn analyzes(self) -> bool {
        matches!(self, Mode::Analyze | Mode::Both)
    }

    pub fn optimizes(self) -> bool {
        matches!(self, Mode::Optimize | Mode::Both)
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "analyze" => Ok(Mode::Analyze),
            "optimize" => Ok(Mode::Optimize),
            "both" => Ok(Mode::Both),
            _ => Err("expected one of analyze, optimize, both".into()),
        }
    }
}

/// Problem-specific settings. Clock settings (`tau_T`, `s`, `t0`) live on
/// [`Scenario`].
#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSpec {
    Dsw {
        n: usize,
        a11: f64,
        a12: f64,
        a21: f64,
        a22: f64,
        b1: f64,
        b2: f64,
        corrected: bool,
        lower: f64,
        upper: f64,
    },
    Dtlz2Dynamic {
        k: usize,
        p: usize,
        g_mode: GMode,
        /// Explicit `G` per change step; `None` means `s * step`.
        g_values: Option<Vec<f64>>,
    },
    MovingPeaks {
        n: usize,
        peaks: usize,
        lower: f64,
        upper: f64,
        dependency: Dependency,
        window: usize,
        walk_height: f64,
        walk_width: f64,
        walk_location: f64,
    },
    Mnk {
        objectives: usize,
        bits: usize,
        epistasis: usize,
        rho: f64,
        neighborhood: Neighborhood,
    },
    TwoSphere {
        n: usize,
        lower: f64,
        upper: f64,
    },
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::Dsw { .. } => "dsw",
            ProblemSpec::Dtlz2Dynamic { .. } => "dtlz2-dynamic",
            ProblemSpec::MovingPeaks { .. } => "moving-peaks",
            ProblemSpec::Mnk { .. } => "mnk",
            ProblemSpec::TwoSphere { .. } => "two-sphere",
        }
    }

    pub fn objectives(&self) -> usize {
        match self {
            ProblemSpec::Dtlz2Dynamic { k, .. } => *k,
            ProblemSpec::Mnk { objectives, .. } => *objectives,
            _ => 2,
        }
    }

    fn is_binary(&self) -> bool {
        matches!(self, ProblemSpec::Mnk { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub problem: ProblemSpec,
    pub mode: Mode,
    pub seed: u64,
    /// Generations per change step.
    pub tau_t: u64,
    /// Severity step.
    pub s: f64,
    pub t0: f64,
    pub t_end: f64,
    /// Grid points per decision dimension.
    pub grid: usize,
    pub grid_budget: u64,
    /// Change tolerance; `None` picks the default for the problem and grid.
    pub eps: Option<f64>,
    /// Problem times sampled by the analysis.
    pub times: Vec<f64>,
    pub budget: u64,
    pub mu: usize,
    pub hv_ref: Option<Vec<f64>>,
    pub out: PathBuf,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Entries::parse(text)?;
        let scenario = Self::resolve(&mut entries)?;
        entries.finish(scenario.problem.name())?;
        Ok(scenario)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// A scenario for `problem` with every default applied.
    pub fn defaults_for(problem: &str) -> Result<Self> {
        Self::parse(&format!("problem = {problem}\n"))
    }

    fn resolve(e: &mut Entries) -> Result<Self> {
        let name: String = e.required("problem")?;
        if !PROBLEM_NAMES.contains(&name.as_str()) {
            return Err(e.invalid(
                "problem",
                format!("unknown problem `{name}`; expected one of {}", PROBLEM_NAMES.join(", ")),
            ));
        }
        let problem = match name.as_str() {
            "dsw" => {
                let spec = ProblemSpec::Dsw {
                    n: e.get("n", 2)?,
                    a11: e.get("a11", 1.0)?,
                    a12: e.get("a12", 0.0)?,
                    a21: e.get("a21", 1.0)?,
                    a22: e.get("a22", 0.0)?,
                    b1: e.get("b1", 1.0)?,
                    b2: e.get("b2", 1.0)?,
                    corrected: e.get("corrected", false)?,
                    lower: e.get("lower", -5.0)?,
                    upper: e.get("upper", 5.0)?,
                };
                if let ProblemSpec::Dsw { n, lower, upper, .. } = &spec {
                    e.check("n", *n >= 1, "must be at least 1")?;
                    e.check("upper", lower < upper, "must exceed `lower`")?;
                }
                spec
            }
            "dtlz2-dynamic" => {
                let k: usize = e.get("k", 2)?;
                let p: usize = e.get("p", 1)?;
                let g_mode = match e.get("g_mode", String::from("one-plus-g"))?.as_str() {
                    "one-plus-g" => GMode::OnePlusG,
                    "product" => GMode::PaperProduct,
                    _ => return Err(e.invalid("g_mode", "expected one-plus-g or product")),
                };
                let g_values = e.optional_list("g_values")?;
                e.check("k", k >= 2, "must be at least 2")?;
                e.check("p", p >= 1, "must be at least 1")?;
                if let Some(values) = &g_values {
                    e.check("g_values", !values.is_empty(), "must not be empty")?;
                    e.check(
                        "g_values",
                        values.iter().all(|g| (0.0..=1.0).contains(g)),
                        "every value must lie in [0, 1]",
                    )?;
                }
                ProblemSpec::Dtlz2Dynamic { k, p, g_mode, g_values }
            }
            "moving-peaks" => {
                let dependency = match e.get("dependency", String::from("state-param"))?.as_str() {
                    "state-param" => Dependency::StateParam,
                    "state-func" => Dependency::StateFunc,
                    _ => return Err(e.invalid("dependency", "expected state-param or state-func")),
                };
                let spec = ProblemSpec::MovingPeaks {
                    n: e.get("n", 2)?,
                    peaks: e.get("peaks", 5)?,
                    lower: e.get("lower", 0.0)?,
                    upper: e.get("upper", 100.0)?,
                    dependency,
                    window: e.get("window", 2)?,
                    walk_height: e.get("walk_height", 7.0)?,
                    walk_width: e.get("walk_width", 1.0)?,
                    walk_location: e.get("walk_location", 1.0)?,
                };
                if let ProblemSpec::MovingPeaks {
                    n,
                    peaks,
                    lower,
                    upper,
                    window,
                    walk_height,
                    walk_width,
                    walk_location,
                    ..
                } = &spec
                {
                    e.check("n", *n >= 1, "must be at least 1")?;
                    e.check("peaks", *peaks >= 1, "must be at least 1")?;
                    e.check("upper", lower < upper, "must exceed `lower`")?;
                    e.check("window", *window >= 1, "must be at least 1")?;
                    e.check("walk_height", *walk_height >= 0.0, "must be non-negative")?;
                    e.check("walk_width", *walk_width >= 0.0, "must be non-negative")?;
                    e.check("walk_location", *walk_location >= 0.0, "must be non-negative")?;
                }
                spec
            }
            "mnk" => {
                let neighborhood = match e.get("neighborhood", String::from("random"))?.as_str() {
                    "random" => Neighborhood::Random,
                    "adjacent" => Neighborhood::Adjacent,
                    _ => return Err(e.invalid("neighborhood", "expected random or adjacent")),
                };
                let objectives: usize = e.get("objectives", 2)?;
                let bits: usize = e.get("bits", 12)?;
                let epistasis: usize = e.get("epistasis", 2)?;
                let rho: f64 = e.get("rho", 0.1)?;
                e.check("objectives", objectives >= 1, "must be at least 1")?;
                e.check("bits", (1..=24).contains(&bits), "must lie in 1..=24")?;
                e.check("epistasis", epistasis < bits && epistasis <= 20, "must be below `bits` and at most 20")?;
                e.check("rho", (0.0..=1.0).contains(&rho), "must lie in [0, 1]")?;
                ProblemSpec::Mnk {
                    objectives,
                    bits,
                    epistasis,
                    rho,
                    neighborhood,
                }
            }
            _ => {
                let n: usize = e.get("n", 2)?;
                let lower: f64 = e.get("lower", -5.0)?;
                let upper: f64 = e.get("upper", 5.0)?;
                e.check("n", n >= 1, "must be at least 1")?;
                e.check("upper", lower < upper, "must exceed `lower`")?;
                ProblemSpec::TwoSphere { n, lower, upper }
            }
        };

        let default_s = match &problem {
            ProblemSpec::Dtlz2Dynamic { .. } => 0.1,
            ProblemSpec::Mnk { .. } => 0.0,
            _ => 1.0,
        };
        let default_grid = if problem.is_binary() { 2 } else { 101 };

        let mode = e.get("mode", Mode::Both)?;
        let seed = e.get("seed", 1u64)?;
        let tau_t = e.get("tau_T", 10u64)?;
        let s = e.get("s", default_s)?;
        let t0 = e.get("t0", 0.0)?;
        let t_end = e.get("t_end", t0 + 10.0)?;
        let grid = e.get("grid", default_grid)?;
        let grid_budget = e.get("grid_budget", crate::pareto::DEFAULT_GRID_BUDGET)?;
        let eps = match e.get("eps", String::from("auto"))?.as_str() {
            "auto" => None,
            text => Some(parse_f64(text).map_err(|m| e.invalid("eps", m))?),
        };
        let times = e.get_list("times", vec![t0, t0 + 1.0])?;
        let budget = e.get("budget", 10_000u64)?;
        let mu = e.get("mu", 100usize)?;
        let hv_ref = match e.get("hv_ref", String::from("none"))?.as_str() {
            "none" => None,
            text => Some(parse_list(text).map_err(|m| e.invalid("hv_ref", m))?),
        };
        let out = PathBuf::from(e.get("out", String::from("out"))?);

        e.check("tau_T", tau_t >= 1, "must be at least 1")?;
        e.check("t_end", t_end >= t0, "must be at least `t0`")?;
        e.check("grid", grid >= 2, "must be at least 2")?;
        if problem.is_binary() {
            e.check("grid", grid == 2, "bit strings are enumerated exhaustively; must be 2")?;
        }
        e.check("grid_budget", grid_budget >= 1, "must be at least 1")?;
        e.check("eps", eps.is_none_or(|v| v >= 0.0), "must be non-negative or `auto`")?;
        e.check("times", times.len() >= 2, "needs at least two values")?;
        e.check(
            "times",
            times.windows(2).all(|w| w[0] <= w[1]),
            "must be non-decreasing",
        )?;
        e.check("mu", mu >= 2, "must be at least 2")?;
        e.check("budget", budget >= mu as u64, "must be at least `mu`")?;
        if let Some(r) = &hv_ref {
            e.check("hv_ref", r.len() == 2, "needs exactly two values")?;
            e.check("hv_ref", problem.objectives() == 2, "applies to two-objective problems only")?;
        }
        e.check("out", !out.as_os_str().is_empty(), "must not be empty")?;

        Ok(Self {
            problem,
            mode,
            seed,
            tau_t,
            s,
            t0,
            t_end,
            grid,
            grid_budget,
            eps,
            times,
            budget,
            mu,
            hv_ref,
            out,
        })
    }

    pub fn time_model(&self) -> TimeModel {
        TimeModel {
            period: self.tau_t,
            severity: self.s,
            t0: self.t0,
            t_end: self.t_end,
            increment: 1.0,
        }
    }

    /// Constructs a fresh problem instance at step 0.
    pub fn build_problem(&self) -> Result<DynamicProblem> {
        let problem = match &self.problem {
            ProblemSpec::Dsw {
                n,
                a11,
                a12,
                a21,
                a22,
                b1,
                b2,
                corrected,
                lower,
                upper,
            } => dsw_make(DswConfig {
                a11: *a11,
                a12: *a12,
                a21: *a21,
                a22: *a22,
                b1: *b1,
                b2: *b2,
                n: *n,
                s: self.s,
                period: self.tau_t,
                t0: self.t0,
                corrected: *corrected,
                lower: *lower,
                upper: *upper,
            })?,
            ProblemSpec::Dtlz2Dynamic { k, p, g_mode, g_values } => {
                dtlz2_dynamic_make(Dtlz2DynConfig {
                    k: *k,
                    p: *p,
                    g_mode: *g_mode,
                    schedule: match g_values {
                        Some(values) => GSchedule::Table(values.clone()),
                        None => GSchedule::Steps { severity: self.s },
                    },
                    period: self.tau_t,
                    t0: self.t0,
                })?
            }
            ProblemSpec::MovingPeaks {
                n,
                peaks,
                lower,
                upper,
                dependency,
                window,
                walk_height,
                walk_width,
                walk_location,
            } => {
                let walk = WalkSeverity {
                    height: *walk_height,
                    width: *walk_width,
                    location: *walk_location,
                };
                let bounds = Bounds::uniform(*n, *lower, *upper)?;
                let mut rng = Rng::substream(self.seed, "moving-peaks");
                let set = PeakSet::random(*peaks, bounds, walk, &mut rng)?;
                moving_peaks_make(set, *dependency, *window)?
            }
            ProblemSpec::Mnk {
                objectives,
                bits,
                epistasis,
                rho,
                neighborhood,
            } => mnk_make(
                MnkConfig {
                    objectives: *objectives,
                    bits: *bits,
                    epistasis: *epistasis,
                    rho: *rho,
                    neighborhood: *neighborhood,
                    period: self.tau_t,
                },
                self.seed,
            )?,
            ProblemSpec::TwoSphere { n, lower, upper } => two_sphere_make(*n, *lower, *upper)?,
        };
        problem.with_time_model(self.time_model())
    }

    /// Canonical text form listing every resolved key.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |key: &str, value: String| {
            let _ = writeln!(out, "{key} = {value}");
        };
        put("problem", self.problem.name().into());
        match &self.problem {
            ProblemSpec::Dsw {
                n,
                a11,
                a12,
                a21,
                a22,
                b1,
                b2,
                corrected,
                lower,
                upper,
            } => {
                put("n", n.to_string());
                put("a11", a11.to_string());
                put("a12", a12.to_string());
                put("a21", a21.to_string());
                put("a22", a22.to_string());
                put("b1", b1.to_string());
                put("b2", b2.to_string());
                put("corrected", corrected.to_string());
                put("lower", lower.to_string());
                put("upper", upper.to_string());
            }
            ProblemSpec::Dtlz2Dynamic { k, p, g_mode, g_values } => {
                put("k", k.to_string());
                put("p", p.to_string());
                put(
                    "g_mode",
                    match g_mode {
                        GMode::OnePlusG => "one-plus-g",
                        GMode::PaperProduct => "product",
                    }
                    .into(),
                );
                if let Some(values) = g_values {
                    put("g_values", join(values));
                }
            }
            ProblemSpec::MovingPeaks {
                n,
                peaks,
                lower,
                upper,
                dependency,
                window,
                walk_height,
                walk_width,
                walk_location,
            } => {
                put("n", n.to_string());
                put("peaks", peaks.to_string());
                put("lower", lower.to_string());
                put("upper", upper.to_string());
                put(
                    "dependency",
                    match dependency {
                        Dependency::StateParam => "state-param",
                        Dependency::StateFunc => "state-func",
                    }
                    .into(),
                );
                put("window", window.to_string());
                put("walk_height", walk_height.to_string());
                put("walk_width", walk_width.to_string());
                put("walk_location", walk_location.to_string());
            }
            ProblemSpec::Mnk {
                objectives,
                bits,
                epistasis,
                rho,
                neighborhood,
            } => {
                put("objectives", objectives.to_string());
                put("bits", bits.to_string());
                put("epistasis", epistasis.to_string());
                put("rho", rho.to_string());
                put(
                    "neighborhood",
                    match neighborhood {
                        Neighborhood::Random => "random",
                        Neighborhood::Adjacent => "adjacent",
                    }
                    .into(),
                );
            }
            ProblemSpec::TwoSphere { n, lower, upper } => {
                put("n", n.to_string());
                put("lower", lower.to_string());
                put("upper", upper.to_string());
            }
        }
        put("mode", self.mode.as_str().into());
        put("seed", self.seed.to_string());
        put("tau_T", self.tau_t.to_string());
        put("s", self.s.to_string());
        put("t0", self.t0.to_string());
        put("t_end", self.t_end.to_string());
        put("grid", self.grid.to_string());
        put("grid_budget", self.grid_budget.to_string());
        put("eps", self.eps.map_or_else(|| "auto".into(), |v| v.to_string()));
        put("times", join(&self.times));
        put("budget", self.budget.to_string());
        put("mu", self.mu.to_string());
        put("hv_ref", self.hv_ref.as_deref().map_or_else(|| "none".into(), join));
        put("out", self.out.display().to_string());
        out
    }
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_f64(text: &str) -> std::result::Result<f64, String> {
    let v: f64 = text
        .parse()
        .map_err(|_| format!("expected a number, got `{text}`"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a finite number, got `{text}`"))
    }
}

fn parse_list(text: &str) -> std::result::Result<Vec<f64>, String> {
    text.split(',').map(|v| parse_f64(v.trim())).collect()
}

/// Scalar values accepted in scenario files.
trait ScenarioValue: Sized {
    fn parse_value(text: &str) -> std::result::Result<Self, String>;
}

impl ScenarioValue for f64 {
    fn parse_value(text: &str) -> std::result::Result<Self, String> {
        parse_f64(text)
    }
}

macro_rules! integer_value {
    ($($t:ty),*) => {$(
        impl ScenarioValue for $t {
            fn parse_value(text: &str) -> std::result::Result<Self, String> {
                text.parse()
                    .map_err(|_| format!("expected a non-negative integer, got `{text}`"))
            }
        }
    )*};
}

integer_value!(u64, usize);

impl ScenarioValue for bool {
    fn parse_value(text: &str) -> std::result::Result<Self, String> {
        match text {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(format!("expected true or false, got `{text}`")),
        }
    }
}

impl ScenarioValue for String {
    fn parse_value(text: &str) -> std::result::Result<Self, String> {
        Ok(text.to_string())
    }
}

impl ScenarioValue for Mode {
    fn parse_value(text: &str) -> std::result::Result<Self, String> {
        text.parse()
    }
}

struct Entry {
    value: String,
    line: usize,
    used: bool,
}

struct Entries {
    map: BTreeMap<String, Entry>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `key = value`, got `{content}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: "missing key before `=`".into(),
                });
            }
            if value.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: format!("missing value for `{key}`"),
                });
            }
            if let Some(prev) = map.get(key).map(|e: &Entry| e.line) {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate key `{key}` (first set on line {prev})"),
                });
            }
            map.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line,
                    used: false,
                },
            );
        }
        Ok(Self { map })
    }

    fn invalid(&self, key: &str, message: impl Into<String>) -> Error {
        let message = message.into();
        Error::Validation {
            key: key.to_string(),
            message: match self.map.get(key) {
                Some(entry) => format!("{message} (line {})", entry.line),
                None => message,
            },
        }
    }

    fn check(&self, key: &str, ok: bool, message: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(self.invalid(key, message))
        }
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        self.map.get_mut(key).map(|e| {
            e.used = true;
            e.value.clone()
        })
    }

    fn get<T: ScenarioValue>(&mut self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            Some(text) => T::parse_value(&text).map_err(|m| self.invalid(key, m)),
            None => Ok(default),
        }
    }

    fn required<T: ScenarioValue>(&mut self, key: &str) -> Result<T> {
        match self.raw(key) {
            Some(text) => T::parse_value(&text).map_err(|m| self.invalid(key, m)),
            None => Err(Error::Validation {
                key: key.to_string(),
                message: "required key is missing".into(),
            }),
        }
    }

    fn get_list(&mut self, key: &str, default: Vec<f64>) -> Result<Vec<f64>> {
        Ok(self.optional_list(key)?.unwrap_or(default))
    }

    fn optional_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.raw(key) {
            Some(text) => parse_list(&text).map(Some).map_err(|m| self.invalid(key, m)),
            None => Ok(None),
        }
    }

    fn finish(&self, problem: &str) -> Result<()> {
        let stray = self
            .map
            .iter()
            .filter(|(_, e)| !e.used)
            .min_by_key(|(_, e)| e.line);
        match stray {
            Some((key, entry)) => Err(Error::Parse {
                line: entry.line,
                message: format!("unknown key `{key}` for problem `{problem}`"),
            }),
            None => Ok(()),
        }
    }
}
