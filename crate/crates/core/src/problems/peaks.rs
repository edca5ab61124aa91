//! Moving peaks: a landscape of cone-shaped peaks over a flat base whose
//! parameters follow a seeded random walk, paired with a static distance
//! objective.
//!
//! Objective 1 is the negated landscape `-max(B, max_i h_i - w_i |x - p_i|)`,
//! objective 2 is `|x - c|` for a fixed reference point `c`.
//!
//! The state parameters are the flattened peak parameters
//! `[h_1, w_1, p_1..., h_2, w_2, p_2..., ...]`.
//! * [`Dependency::StateParam`]: the history map appends the latest peak
//!   parameters to `x`, and the support reads them from that tail.
//! * [`Dependency::StateFunc`]: each state stores a frozen landscape, and the
//!   problem is evaluated on the landscape of the previous step.

use std::sync::Arc;

use crate::dynamics::{
    third_order_func, third_order_param, DynamicProblem, FnSupport, HistoryContext,
    ParamHistoryMap, StateHistory, SupportFunction, ValueHistoryMap, ValueMap,
};
use crate::error::{check_dim, Error, Result};
use crate::rng::Rng;
use crate::types::{Bounds, ObjectiveVector};

#[derive(Clone, Debug, PartialEq)]
pub struct Peak {
    pub height: f64,
    pub width: f64,
    pub location: Vec<f64>,
}

/// Standard deviations of the per-advance Gaussian steps.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct WalkSeverity {
    pub height: f64,
    pub width: f64,
    pub location: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
    /// Flat base level `B`.
    pub base: f64,
    pub walk: WalkSeverity,
    pub bounds: Bounds,
    pub width_floor: f64,
    pub height_floor: f64,
    /// Reference point `c` of the distance objective.
    pub companion: Vec<f64>,
}

impl PeakSet {
    /// Peaks with the base at 0, floors at `1e-3` and `c` at the bounds centre.
    pub fn new(peaks: Vec<Peak>, bounds: Bounds, walk: WalkSeverity) -> Result<Self> {
        let companion = bounds.center();
        let set = Self {
            peaks,
            base: 0.0,
            walk,
            bounds,
            width_floor: 1e-3,
            height_floor: 1e-3,
            companion,
        };
        set.validate()?;
        Ok(set)
    }

    /// `m` peaks with heights in `[30, 70)`, widths in `[1, 12)` and uniform
    /// locations, drawn from `rng`.
    pub fn random(m: usize, bounds: Bounds, walk: WalkSeverity, rng: &mut Rng) -> Result<Self> {
        let peaks = (0..m)
            .map(|_| Peak {
                height: rng.uniform(30.0, 70.0),
                width: rng.uniform(1.0, 12.0),
                location: bounds.sample(rng),
            })
            .collect();
        Self::new(peaks, bounds, walk)
    }

    pub fn validate(&self) -> Result<()> {
        if self.peaks.is_empty() {
            return Err(Error::Config("moving peaks needs at least one peak".into()));
        }
        check_dim(self.dimension(), self.companion.len())?;
        for (i, peak) in self.peaks.iter().enumerate() {
            if !(peak.height > 0.0) || !(peak.width > 0.0) {
                return Err(Error::Config(format!(
                    "peak {i} needs positive height and width"
                )));
            }
            self.bounds.check_contains(&peak.location)?;
        }
        if !(self.width_floor > 0.0) || !(self.height_floor > 0.0) {
            return Err(Error::Config("peak floors must be positive".into()));
        }
        let w = self.walk;
        if [w.height, w.width, w.location].iter().any(|s| !(*s >= 0.0)) {
            return Err(Error::Config("walk severities must be non-negative".into()));
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.bounds.dimension()
    }

    fn stride(&self) -> usize {
        self.dimension() + 2
    }

    pub fn to_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.peaks.len() * self.stride());
        for peak in &self.peaks {
            out.push(peak.height);
            out.push(peak.width);
            out.extend_from_slice(&peak.location);
        }
        out
    }

    /// Same shape and settings with the peak parameters replaced.
    pub fn with_params(&self, params: &[f64]) -> Result<Self> {
        check_dim(self.peaks.len() * self.stride(), params.len())?;
        let peaks = params
            .chunks_exact(self.stride())
            .map(|c| Peak {
                height: c[0],
                width: c[1],
                location: c[2..].to_vec(),
            })
            .collect();
        Ok(Self {
            peaks,
            ..self.clone()
        })
    }

    /// One random-walk step: per peak, height, width, then each location
    /// coordinate receives `sigma * N(0, 1)`; results are clamped to the
    /// floors and the bounds.
    pub fn walked(&self, rng: &mut Rng) -> Self {
        let w = self.walk;
        let peaks = self
            .peaks
            .iter()
            .map(|peak| {
                let height = (peak.height + w.height * rng.normal()).max(self.height_floor);
                let width = (peak.width + w.width * rng.normal()).max(self.width_floor);
                let location = peak
                    .location
                    .iter()
                    .zip(self.bounds.lower().iter().zip(self.bounds.upper()))
                    .map(|(p, (lo, hi))| (p + w.location * rng.normal()).clamp(*lo, *hi))
                    .collect();
                Peak {
                    height,
                    width,
                    location,
                }
            })
            .collect();
        Self {
            peaks,
            ..self.clone()
        }
    }

    /// `[-landscape(x), |x - c|]`.
    pub fn objectives(&self, x: &[f64]) -> Vec<f64> {
        let landscape = moving_peaks_landscape(x, self);
        vec![-landscape, distance(x, &self.companion)]
    }

    fn frozen(&self) -> Arc<dyn SupportFunction> {
        let peaks = self.clone();
        FnSupport::stationary(2, self.bounds.clone(), move |x| peaks.objectives(x)).into_arc()
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `max(B, max_i h_i - w_i |x - p_i|)`.
pub fn moving_peaks_landscape(x: &[f64], peaks: &PeakSet) -> f64 {
    peaks
        .peaks
        .iter()
        .map(|p| p.height - p.width * distance(x, &p.location))
        .fold(peaks.base, f64::max)
}

/// How the peak state enters the evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dependency {
    StateParam,
    StateFunc,
}

/// History map shared by both moving-peaks variants.
#[derive(Clone, Debug)]
pub struct PeakWalk {
    template: PeakSet,
}

impl PeakWalk {
    pub fn new(template: PeakSet) -> Self {
        Self { template }
    }

    fn decode(&self, params: &[f64]) -> PeakSet {
        self.template
            .with_params(params)
            .expect("peak parameters keep their shape")
    }

    fn walk(&self, window: &StateHistory, rng: &mut Rng) -> Vec<f64> {
        self.decode(&window.latest().params).walked(rng).to_params()
    }
}

impl ParamHistoryMap for PeakWalk {
    fn initial_params(&self) -> Vec<f64> {
        self.template.to_params()
    }

    fn next_params(&self, window: &StateHistory, rng: &mut Rng) -> Vec<f64> {
        self.walk(window, rng)
    }

    fn input_bounds(&self, _support: &dyn SupportFunction) -> Bounds {
        self.template.bounds.clone()
    }

    fn apply(&self, window: &StateHistory, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.template.dimension(), x.len())?;
        let mut y = x.to_vec();
        y.extend_from_slice(&window.latest().params);
        Ok(y)
    }
}

impl ValueHistoryMap for PeakWalk {
    fn initial_params(&self) -> Vec<f64> {
        self.template.to_params()
    }

    fn next_params(&self, window: &StateHistory, rng: &mut Rng) -> Vec<f64> {
        self.walk(window, rng)
    }

    fn freeze(
        &self,
        _support: &Arc<dyn SupportFunction>,
        params: &[f64],
    ) -> Result<Arc<dyn SupportFunction>> {
        Ok(self.template.with_params(params)?.frozen())
    }

    fn apply(&self, current: ObjectiveVector, ctx: &HistoryContext<'_>) -> Result<ObjectiveVector> {
        ValueMap::PreviousLandscape.apply(current, ctx)
    }
}

/// Support over `(x, peak parameters)`, used by the parameter-state variant.
fn augmented_support(template: &PeakSet) -> Arc<dyn SupportFunction> {
    let n = template.dimension();
    let extra = template.peaks.len() * template.stride();
    let free = Bounds::uniform(extra, f64::NEG_INFINITY, f64::INFINITY)
        .expect("unbounded box is valid");
    let bounds = template.bounds.concat(&free);
    let template = template.clone();
    FnSupport::stationary(2, bounds, move |y| {
        let peaks = template
            .with_params(&y[n..])
            .expect("augmented input keeps its shape");
        peaks.objectives(&y[..n])
    })
    .into_arc()
}

/// Third-order moving-peaks problem with a state window of `window` entries.
pub fn moving_peaks_make(
    peaks: PeakSet,
    dependency: Dependency,
    window: usize,
) -> Result<DynamicProblem> {
    peaks.validate()?;
    let walk = Arc::new(PeakWalk::new(peaks.clone()));
    let problem = match dependency {
        Dependency::StateParam => third_order_param(augmented_support(&peaks), walk, window)?,
        Dependency::StateFunc => third_order_func(peaks.frozen(), walk, window)?,
    };
    Ok(problem.with_name("moving-peaks"))
}
