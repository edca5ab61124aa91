//! Bounded state windows and the history maps `T^{[t-j, t]}` of
//! state-dependent problems.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::SupportFunction;
use crate::error::{check_dim, Error, Result};
use crate::rng::Rng;
use crate::types::{Bounds, Environment, ObjectiveVector};

/// One recorded system state.
#[derive(Clone, Serialize)]
pub struct SystemState {
    pub step: u64,
    pub t: f64,
    /// Frozen parameter values of the state.
    pub params: Vec<f64>,
    /// Frozen landscape evaluator, present for function-history problems.
    #[serde(skip)]
    pub landscape: Option<Arc<dyn SupportFunction>>,
}

impl fmt::Debug for SystemState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemState")
            .field("step", &self.step)
            .field("t", &self.t)
            .field("params", &self.params)
            .field("landscape", &self.landscape.is_some())
            .finish()
    }
}

/// The last `window` states, oldest first. Never empty: the initial state
/// is recorded at construction.
#[derive(Clone, Debug, Serialize)]
pub struct StateHistory {
    window: usize,
    entries: VecDeque<SystemState>,
}

impl StateHistory {
    pub fn new(window: usize, initial: SystemState) -> Result<Self> {
        if window == 0 {
            return Err(Error::Config("history window must be at least 1".into()));
        }
        let mut entries = VecDeque::with_capacity(window);
        entries.push_back(initial);
        Ok(Self { window, entries })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn latest(&self) -> &SystemState {
        self.entries.back().expect("history is never empty")
    }

    /// The state `lag` steps back from the latest (`lag = 0` is the latest).
    pub fn lagged(&self, lag: usize) -> Option<&SystemState> {
        self.entries.len().checked_sub(lag + 1).map(|i| &self.entries[i])
    }

    /// The state before the latest, or the latest on a single-entry window.
    pub fn previous_or_latest(&self) -> &SystemState {
        self.lagged(1).unwrap_or_else(|| self.latest())
    }

    pub fn iter(&self) -> impl Iterator<Item = &SystemState> {
        self.entries.iter()
    }

    pub(crate) fn push(&mut self, state: SystemState) {
        debug_assert!(state.step > self.latest().step);
        if self.entries.len() == self.window {
            self.entries.pop_front();
        }
        self.entries.push_back(state);
    }

    pub(crate) fn restamp_initial(&mut self, t: f64) {
        if self.entries.len() == 1 && self.entries[0].step == 0 {
            self.entries[0].t = t;
        }
    }

    /// Canonical byte encoding of the recorded steps, times and parameters.
    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("history serialises")
    }
}

/// A parameter-history map: `F(T(window, x))`.
///
/// The state parameters evolve through [`next_params`](Self::next_params) on
/// each advance; [`apply`](Self::apply) maps the decision vector through the
/// window. Before the first advance the window holds only the initial state.
pub trait ParamHistoryMap: Send + Sync {
    fn initial_params(&self) -> Vec<f64> {
        Vec::new()
    }

    fn next_params(&self, window: &StateHistory, _rng: &mut Rng) -> Vec<f64> {
        window.latest().params.clone()
    }

    /// Decision-space box of the composed problem.
    fn input_bounds(&self, support: &dyn SupportFunction) -> Bounds {
        support.bounds().clone()
    }

    fn apply(&self, window: &StateHistory, x: &[f64]) -> Result<Vec<f64>>;
}

/// `T(window, x) = x`.
#[derive(Clone, Copy, Debug, Default)]
pub struct IgnoreHistory;

impl ParamHistoryMap for IgnoreHistory {
    fn apply(&self, _window: &StateHistory, x: &[f64]) -> Result<Vec<f64>> {
        Ok(x.to_vec())
    }
}

/// `T(window, x) = x + o_latest` with a Gaussian random walk on the offset.
#[derive(Clone, Debug)]
pub struct OffsetWalk {
    pub initial: Vec<f64>,
    pub sigma: f64,
}

impl OffsetWalk {
    pub fn new(initial: Vec<f64>, sigma: f64) -> Self {
        Self { initial, sigma }
    }
}

impl ParamHistoryMap for OffsetWalk {
    fn initial_params(&self) -> Vec<f64> {
        self.initial.clone()
    }

    fn next_params(&self, window: &StateHistory, rng: &mut Rng) -> Vec<f64> {
        window
            .latest()
            .params
            .iter()
            .map(|o| o + self.sigma * rng.normal())
            .collect()
    }

    fn apply(&self, window: &StateHistory, x: &[f64]) -> Result<Vec<f64>> {
        let offset = &window.latest().params;
        check_dim(offset.len(), x.len())?;
        Ok(x.iter().zip(offset).map(|(v, o)| v + o).collect())
    }
}

/// Arguments available to a value-history map.
pub struct HistoryContext<'a> {
    pub window: &'a StateHistory,
    pub x: &'a [f64],
    pub env: &'a Environment,
    pub t: f64,
}

/// A function-history map: `T(F(x), window)`.
///
/// `current` is the support evaluated through the latest state's frozen
/// landscape. Maps may evaluate any stored landscape at arbitrary `x`.
pub trait ValueHistoryMap: Send + Sync {
    fn initial_params(&self) -> Vec<f64> {
        Vec::new()
    }

    fn next_params(&self, window: &StateHistory, _rng: &mut Rng) -> Vec<f64> {
        window.latest().params.clone()
    }

    /// Frozen landscape for a state with the given parameters.
    fn freeze(
        &self,
        support: &Arc<dyn SupportFunction>,
        _params: &[f64],
    ) -> Result<Arc<dyn SupportFunction>> {
        Ok(Arc::clone(support))
    }

    fn apply(&self, current: ObjectiveVector, ctx: &HistoryContext<'_>) -> Result<ObjectiveVector>;
}

/// Common value-history maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueMap {
    /// The current value only.
    Current,
    /// The landscape of the previous step evaluated at `x`.
    PreviousLandscape,
    /// Mean over every landscape in the window evaluated at `x`.
    WindowMean,
}

pub(crate) fn landscape_value(
    state: &SystemState,
    ctx: &HistoryContext<'_>,
) -> Result<ObjectiveVector> {
    let landscape = state
        .landscape
        .as_ref()
        .ok_or_else(|| Error::Config(format!("state {} carries no landscape", state.step)))?;
    landscape.evaluate(ctx.x, ctx.env, ctx.t)
}

impl ValueHistoryMap for ValueMap {
    fn apply(&self, current: ObjectiveVector, ctx: &HistoryContext<'_>) -> Result<ObjectiveVector> {
        match self {
            ValueMap::Current => Ok(current),
            ValueMap::PreviousLandscape => match ctx.window.lagged(1) {
                Some(previous) => landscape_value(previous, ctx),
                None => Ok(current),
            },
            ValueMap::WindowMean => {
                let mut sum = vec![0.0; current.len()];
                for state in ctx.window.iter() {
                    let v = landscape_value(state, ctx)?;
                    check_dim(sum.len(), v.len())?;
                    sum.iter_mut().zip(v.iter()).for_each(|(s, v)| *s += v);
                }
                let n = ctx.window.len() as f64;
                Ok(ObjectiveVector(sum.into_iter().map(|s| s / n).collect()))
            }
        }
    }
}
