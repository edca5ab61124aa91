//! Composition framework for dynamic problems `H(F, D, x, t)`.
//!
//! A static [`SupportFunction`] is wrapped with one dynamic component:
//!
//! | order        | component                    | evaluation                      |
//! |--------------|------------------------------|---------------------------------|
//! | first        | [`ParameterTransform`]       | `f_i(d_i(x, t))`                |
//! | second       | [`ObjectiveTransform`]       | `d_i(F(x), x, t)`               |
//! | third/param  | [`ParamHistoryMap`]          | `F(T(window, x))`               |
//! | third/func   | [`ValueHistoryMap`]          | `T(F(x), window)`               |
//! | fourth       | [`EnvironmentSchedule`]      | `F_{D(sigma, t)}(x, t)`         |
//!
//! Evaluation is pure for a frozen state. Third-order state only moves
//! through [`DynamicProblem::advance`]. A composed [`DynamicProblem`] is
//! itself a [`SupportFunction`], so compositions nest; the outermost order
//! is the one reported.

mod history;
mod integral;
mod online;
mod problem;
mod transform;

use std::fmt;
use std::sync::Arc;

use crate::error::{check_dim, Result};
use crate::types::{Bounds, Environment, ObjectiveVector};

pub use history::{
    HistoryContext, IgnoreHistory, OffsetWalk, ParamHistoryMap, StateHistory, SystemState, ValueHistoryMap,
    ValueMap,
};
pub use integral::trajectory_integral;
pub use online::{EnvironmentSchedule, IdentitySchedule, StepParamSchedule, SupportFamily};
pub use problem::{
    first_order_compose, fourth_order_compose, second_order_compose, static_problem,
    third_order_func, third_order_param, DynamicProblem, Order, ReferenceFront,
};
pub use transform::{ObjectiveMap, ObjectiveTransform, ParameterMap, ParameterTransform};

/// How decision variables are represented.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    Real,
    /// Components are 0.0 or 1.0; values are read as `x >= 0.5`.
    Binary,
}

/// A multi-objective function `F_sigma : X -> Y`.
///
/// Implementations must be pure in `(x, env, t)`. Stationary supports simply
/// ignore `t`; the parameter exists so composed problems can serve as
/// supports for further compositions.
pub trait SupportFunction: Send + Sync {
    fn dimension(&self) -> usize;
    fn objectives(&self) -> usize;
    fn bounds(&self) -> &Bounds;

    fn encoding(&self) -> Encoding {
        Encoding::Real
    }

    fn evaluate(&self, x: &[f64], env: &Environment, t: f64) -> Result<ObjectiveVector>;
}

type EvalFn = dyn Fn(&[f64], &Environment, f64) -> Vec<f64> + Send + Sync;

/// Support function backed by a closure.
#[derive(Clone)]
pub struct FnSupport {
    objectives: usize,
    bounds: Bounds,
    encoding: Encoding,
    f: Arc<EvalFn>,
}

impl FnSupport {
    pub fn new<F>(objectives: usize, bounds: Bounds, f: F) -> Self
    where
        F: Fn(&[f64], &Environment, f64) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            objectives,
            bounds,
            encoding: Encoding::Real,
            f: Arc::new(f),
        }
    }

    /// A support depending on `x` only.
    pub fn stationary<F>(objectives: usize, bounds: Bounds, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self::new(objectives, bounds, move |x, _, _| f(x))
    }

    pub fn with_encoding(mut self, encoding: Encoding) -> Self {
        self.encoding = encoding;
        self
    }

    pub fn into_arc(self) -> Arc<dyn SupportFunction> {
        Arc::new(self)
    }
}

impl fmt::Debug for FnSupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnSupport")
            .field("dimension", &self.bounds.dimension())
            .field("objectives", &self.objectives)
            .finish()
    }
}

impl SupportFunction for FnSupport {
    fn dimension(&self) -> usize {
        self.bounds.dimension()
    }

    fn objectives(&self) -> usize {
        self.objectives
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn encoding(&self) -> Encoding {
        self.encoding
    }

    fn evaluate(&self, x: &[f64], env: &Environment, t: f64) -> Result<ObjectiveVector> {
        check_dim(self.dimension(), x.len())?;
        let values = ObjectiveVector((self.f)(x, env, t));
        check_dim(self.objectives, values.len())?;
        values.check_finite()?;
        Ok(values)
    }
}
