//! Discrete generation counter to problem time mapping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generation counter together with the problem time it maps to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimePoint {
    pub tau: u64,
    pub t: f64,
}

/// Piecewise-constant clock: problem time moves by `increment` every
/// `period` generations, and the change severity scales with the step index.
///
/// Setting `period` to the run horizon gives the literal `floor(tau / tau_end)`
/// clock, which only changes once at the very end of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeModel {
    /// Generations per change period (`tau_T`).
    pub period: u64,
    /// Severity step `s`, the shift per change step used by `G(t) = s * step`.
    pub severity: f64,
    pub t0: f64,
    pub t_end: f64,
    /// Problem time added per change period.
    pub increment: f64,
}

impl Default for TimeModel {
    fn default() -> Self {
        Self {
            period: 10,
            severity: 1.0,
            t0: 0.0,
            t_end: 10.0,
            increment: 1.0,
        }
    }
}

impl TimeModel {
    pub fn new(period: u64, severity: f64) -> Result<Self> {
        let model = Self {
            period,
            severity,
            ..Self::default()
        };
        model.validate()?;
        Ok(model)
    }

    /// Clock starting at `t0` with the default horizon length.
    pub fn starting_at(period: u64, severity: f64, t0: f64) -> Result<Self> {
        let span = Self::default().t_end - Self::default().t0;
        let model = Self {
            period,
            severity,
            t0,
            t_end: t0 + span,
            ..Self::default()
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.period == 0 {
            return Err(Error::Config("change period must be at least 1".into()));
        }
        if !self.t0.is_finite() || !self.t_end.is_finite() {
            return Err(Error::Config("t0 and t_end must be finite".into()));
        }
        if !(self.t0 <= self.t_end) {
            return Err(Error::Config(format!(
                "t0 = {} exceeds t_end = {}",
                self.t0, self.t_end
            )));
        }
        if !(self.increment > 0.0) || !self.increment.is_finite() {
            return Err(Error::Config("time increment must be positive".into()));
        }
        if !self.severity.is_finite() {
            return Err(Error::Config("severity must be finite".into()));
        }
        Ok(())
    }

    /// `floor(tau / period)`.
    pub fn step_index(&self, tau: u64) -> u64 {
        tau / self.period
    }

    /// Problem time reached after `step` change periods.
    pub fn time_of_step(&self, step: u64) -> f64 {
        self.t0 + step as f64 * self.increment
    }

    /// Change step index in effect at problem time `t` (0 before `t0`).
    pub fn step_at(&self, t: f64) -> u64 {
        if !(t > self.t0) {
            return 0;
        }
        // absorbs rounding in t0 + k * increment
        ((t - self.t0) / self.increment + 1e-9).floor() as u64
    }

    /// `G(t) = s * step(t)`.
    pub fn shift_at(&self, t: f64) -> f64 {
        self.severity * self.step_at(t) as f64
    }

    pub fn time_point(&self, tau: u64) -> TimePoint {
        TimePoint {
            tau,
            t: time_of(tau, self),
        }
    }
}

/// Problem time at generation `tau`: `t0 + floor(tau / tau_T) * increment`.
pub fn time_of(tau: u64, model: &TimeModel) -> f64 {
    model.time_of_step(model.step_index(tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn time_of_examples() {
        let m = TimeModel::new(10, 1.0).unwrap();
        assert_eq!(time_of(0, &m), 0.0);
        assert_eq!(time_of(9, &m), 0.0);
        assert_eq!(time_of(10, &m), 1.0);
    }

    #[test]
    fn zero_period_rejected() {
        assert!(TimeModel::new(0, 1.0).is_err());
    }

    #[test]
    fn step_at_inverts_time_of_step() {
        let m = TimeModel {
            increment: 0.1,
            t0: 0.3,
            ..TimeModel::default()
        };
        for step in 0..200 {
            assert_eq!(m.step_at(m.time_of_step(step)), step);
        }
        assert_eq!(m.step_at(-1.0), 0);
    }

    proptest! {
        #[test]
        fn time_is_monotone(tau in 0u64..100_000, period in 1u64..50, inc in 0.01f64..5.0) {
            let m = TimeModel { period, increment: inc, ..TimeModel::default() };
            prop_assert!(time_of(tau + 1, &m) >= time_of(tau, &m));
        }
    }
}
