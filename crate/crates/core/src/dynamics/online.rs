use std::sync::Arc;

use super::SupportFunction;
use crate::error::Result;
use crate::types::Environment;

/// `sigma -> F_sigma`: builds the support function for an environment.
pub type SupportFamily =
    Arc<dyn Fn(&Environment) -> Result<Arc<dyn SupportFunction>> + Send + Sync>;

/// `D(sigma, t)`: the environment in effect at a change step.
///
/// Must be deterministic in `(base, step)`; it always receives the initial
/// environment and returns a fresh value.
pub trait EnvironmentSchedule: Send + Sync {
    fn environment_at(&self, base: &Environment, step: u64, t: f64) -> Environment;
}

impl<F> EnvironmentSchedule for F
where
    F: Fn(&Environment, u64, f64) -> Environment + Send + Sync,
{
    fn environment_at(&self, base: &Environment, step: u64, t: f64) -> Environment {
        self(base, step, t)
    }
}

/// Keeps the initial environment forever.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentitySchedule;

impl EnvironmentSchedule for IdentitySchedule {
    fn environment_at(&self, base: &Environment, _step: u64, _t: f64) -> Environment {
        base.clone()
    }
}

/// Sets parameter `name` to `values[step]`, holding the last value after
/// the table runs out.
#[derive(Clone, Debug)]
pub struct StepParamSchedule {
    pub name: String,
    pub values: Vec<f64>,
}

impl EnvironmentSchedule for StepParamSchedule {
    fn environment_at(&self, base: &Environment, step: u64, _t: f64) -> Environment {
        match self.values.get(step as usize).or(self.values.last()) {
            Some(&v) => base.with_param(self.name.clone(), v),
            None => base.clone(),
        }
    }
}
