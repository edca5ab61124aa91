//! DTLZ2 support function and its objective-space dynamic variant
//! `d_i = g(x_k, t) f_i(x)` with `g(x_k, t) = G(t) + sum (x_i - G(t))^2`.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use crate::dynamics::{
    second_order_compose, static_problem, DynamicProblem, FnSupport, ObjectiveTransform,
};
use crate::error::{Error, Result};
use crate::time::TimeModel;
use crate::types::{Bounds, ObjectiveVector};

/// How `g` scales the support.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GMode {
    /// `g(x_k, t) * f_i(x)`; collapses to the origin when `G(t) = 0`.
    PaperProduct,
    /// `(1 + g(x_k, t)) * f_i(x)`.
    OnePlusG,
}

/// `G(t)` as a function of the change step.
#[derive(Clone, Debug, PartialEq)]
pub enum GSchedule {
    /// `s * step`, clamped into `[0, 1]`.
    Steps { severity: f64 },
    /// Explicit value per step; the last value holds afterwards.
    Table(Vec<f64>),
}

impl GSchedule {
    pub fn at_step(&self, step: u64) -> f64 {
        match self {
            GSchedule::Steps { severity } => (severity * step as f64).clamp(0.0, 1.0),
            GSchedule::Table(values) => {
                let i = (step as usize).min(values.len().saturating_sub(1));
                values.get(i).copied().unwrap_or(0.0)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            GSchedule::Steps { severity } if !severity.is_finite() => {
                Err(Error::Config("G severity must be finite".into()))
            }
            GSchedule::Table(values) if values.is_empty() => {
                Err(Error::Config("G table must not be empty".into()))
            }
            GSchedule::Table(values) if values.iter().any(|g| !(0.0..=1.0).contains(g)) => {
                Err(Error::Config("G values must lie in [0, 1]".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dtlz2DynConfig {
    /// Objectives `k`.
    pub k: usize,
    /// Size `p` of the `x_k` block; the problem has `p + k - 1` variables.
    pub p: usize,
    pub g_mode: GMode,
    pub schedule: GSchedule,
    pub period: u64,
    pub t0: f64,
}

impl Default for Dtlz2DynConfig {
    fn default() -> Self {
        Self {
            k: 2,
            p: 1,
            g_mode: GMode::OnePlusG,
            schedule: GSchedule::Steps { severity: 0.1 },
            period: 10,
            t0: 0.0,
        }
    }
}

impl Dtlz2DynConfig {
    pub fn dimension(&self) -> usize {
        self.p + self.k - 1
    }

    fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Config("DTLZ2 needs at least 2 objectives".into()));
        }
        if self.p == 0 {
            return Err(Error::Config("DTLZ2 needs at least one x_k variable".into()));
        }
        self.schedule.validate()
    }
}

/// Product-of-cosines support on the first `k - 1` variables:
/// `f_1 = prod_{j<k} cos(x_j pi/2)`,
/// `f_i = sin(x_{k-i+1} pi/2) prod_{j<=k-i} cos(x_j pi/2)`,
/// `f_k = sin(x_1 pi/2)`. Lies on the unit sphere.
pub fn dtlz2_support(x: &[f64], k: usize) -> Result<ObjectiveVector> {
    if k < 2 {
        return Err(Error::Config("DTLZ2 needs at least 2 objectives".into()));
    }
    if x.len() < k - 1 {
        return Err(Error::DimensionMismatch {
            expected: k - 1,
            found: x.len(),
        });
    }
    let position = &x[..k - 1];
    Bounds::uniform(k - 1, 0.0, 1.0)?.check_contains(position)?;
    Ok(ObjectiveVector(sphere_point(position, k)))
}

fn sphere_point(position: &[f64], k: usize) -> Vec<f64> {
    (1..=k)
        .map(|i| {
            let cosines: f64 = position[..k - i]
                .iter()
                .map(|xj| (xj * FRAC_PI_2).cos())
                .product();
            if i == 1 {
                cosines
            } else {
                (position[k - i] * FRAC_PI_2).sin() * cosines
            }
        })
        .collect()
}

/// `g(x_k, G) = G + sum (x_i - G)^2` over the trailing `p` variables.
pub fn dtlz2_g(tail: &[f64], g_shift: f64) -> f64 {
    g_shift + tail.iter().map(|v| (v - g_shift).powi(2)).sum::<f64>()
}

fn unit_support(k: usize, p: usize) -> Result<FnSupport> {
    let bounds = Bounds::uniform(p + k - 1, 0.0, 1.0)?;
    Ok(FnSupport::stationary(k, bounds, move |x| sphere_point(&x[..k - 1], k)))
}

/// Second-order dynamic DTLZ2.
pub fn dtlz2_dynamic_make(cfg: Dtlz2DynConfig) -> Result<DynamicProblem> {
    cfg.validate()?;
    let time = TimeModel::starting_at(cfg.period, 1.0, cfg.t0)?;
    let (k, mode) = (cfg.k, cfg.g_mode);
    let clock = time.clone();
    let schedule = cfg.schedule.clone();
    let d = ObjectiveTransform::from_fn(k, move |i, values, x, t| {
        let g = dtlz2_g(&x[k - 1..], schedule.at_step(clock.step_at(t)));
        match mode {
            GMode::PaperProduct => g * values[i],
            GMode::OnePlusG => (1.0 + g) * values[i],
        }
    });

    let reference_schedule = cfg.schedule.clone();
    let reference_clock = time.clone();
    let mut problem = second_order_compose(Arc::new(unit_support(k, cfg.p)?), d)?
        .with_name("dtlz2-dynamic")
        .with_time_model(time)?;
    if k == 2 {
        // minimal g is G itself, reached at x_k = G
        problem = problem.with_reference(move |t, points| {
            let shift = reference_schedule.at_step(reference_clock.step_at(t));
            let radius = match mode {
                GMode::PaperProduct => shift,
                GMode::OnePlusG => 1.0 + shift,
            };
            quarter_circle(radius, points)
        });
    }
    Ok(problem)
}

fn quarter_circle(radius: f64, points: usize) -> Vec<ObjectiveVector> {
    let last = points.saturating_sub(1).max(1) as f64;
    (0..points)
        .map(|i| {
            let a = FRAC_PI_2 * i as f64 / last;
            ObjectiveVector(vec![radius * a.cos(), radius * a.sin()])
        })
        .collect()
}

fn static_support(k: usize, p: usize) -> Result<FnSupport> {
    let bounds = Bounds::uniform(p + k - 1, 0.0, 1.0)?;
    Ok(FnSupport::stationary(k, bounds, move |x| {
        let g: f64 = x[k - 1..].iter().map(|v| (v - 0.5).powi(2)).sum();
        sphere_point(&x[..k - 1], k)
            .into_iter()
            .map(|f| (1.0 + g) * f)
            .collect()
    }))
}

/// The stationary DTLZ2 baseline: `(1 + g) f_i` with `g = sum (x_i - 0.5)^2`.
pub fn dtlz2_static_make(k: usize, p: usize) -> Result<DynamicProblem> {
    Dtlz2DynConfig {
        k,
        p,
        ..Dtlz2DynConfig::default()
    }
    .validate()?;
    Ok(static_problem(Arc::new(static_support(k, p)?))
        .with_name("dtlz2")
        .with_reference(|_, points| quarter_circle(1.0, points)))
}

/// Stationary DTLZ2 scaled by `1 + G(t)`: the Pareto set stays at
/// `x_k = 0.5` while the front radius follows `G`.
pub fn dtlz2_scaled_make(k: usize, p: usize, schedule: GSchedule, period: u64) -> Result<DynamicProblem> {
    schedule.validate()?;
    let time = TimeModel::new(period, 1.0)?;
    let clock = time.clone();
    let d = ObjectiveTransform::from_fn(k, move |i, values, _, t| {
        (1.0 + schedule.at_step(clock.step_at(t))) * values[i]
    });
    second_order_compose(Arc::new(static_support(k, p)?), d)?
        .with_name("dtlz2-scaled")
        .with_time_model(time)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15)
    }

    #[test]
    fn support_examples() {
        assert!(close(&dtlz2_support(&[0.0], 2).unwrap(), &[1.0, 0.0]));
        assert!(close(&dtlz2_support(&[1.0], 2).unwrap(), &[0.0, 1.0]));
        // hand evaluation of the three branches at x = (0.5, 0.5)
        let c = std::f64::consts::FRAC_PI_4.cos();
        let s = std::f64::consts::FRAC_PI_4.sin();
        let expected = [c * c, c * s, s];
        assert!(close(&dtlz2_support(&[0.5, 0.5], 3).unwrap(), &expected));
        assert!((expected[0] - 0.5).abs() < 1e-15 && (expected[2] - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn support_rejects_out_of_bounds() {
        assert!(matches!(dtlz2_support(&[1.5], 2), Err(Error::OutOfBounds { .. })));
        assert!(dtlz2_support(&[], 2).is_err());
    }

    #[test]
    fn support_lies_on_unit_sphere() {
        let mut rng = Rng::substream(5, "dtlz2");
        for k in 2..=4 {
            for _ in 0..1000 {
                let x: Vec<f64> = (0..k - 1).map(|_| rng.unit()).collect();
                let f = dtlz2_support(&x, k).unwrap();
                let sq: f64 = f.iter().map(|v| v * v).sum();
                assert!((sq - 1.0).abs() <= 1e-12);
            }
        }
    }

    fn cfg(mode: GMode, g: f64) -> Dtlz2DynConfig {
        Dtlz2DynConfig {
            k: 2,
            p: 1,
            g_mode: mode,
            schedule: GSchedule::Table(vec![g]),
            period: 10,
            t0: 0.0,
        }
    }

    #[test]
    fn dynamic_examples() {
        let paper = dtlz2_dynamic_make(cfg(GMode::PaperProduct, 0.5)).unwrap();
        assert_eq!(paper.evaluate(&[0.0, 0.5], 0.0).unwrap().0, vec![0.5, 0.0]);
        let one_plus = dtlz2_dynamic_make(cfg(GMode::OnePlusG, 0.5)).unwrap();
        assert_eq!(one_plus.evaluate(&[0.0, 0.5], 0.0).unwrap().0, vec![1.5, 0.0]);
        let degenerate = dtlz2_dynamic_make(cfg(GMode::PaperProduct, 0.0)).unwrap();
        for x1 in [0.0, 0.3, 1.0] {
            assert_eq!(degenerate.evaluate(&[x1, 0.0], 0.0).unwrap().0, vec![0.0, 0.0]);
        }
    }

    #[test]
    fn schedule_steps_and_tables() {
        assert_eq!(GSchedule::Steps { severity: 0.4 }.at_step(3), 1.0);
        assert_eq!(GSchedule::Steps { severity: 0.25 }.at_step(2), 0.5);
        let table = GSchedule::Table(vec![0.1, 0.5]);
        assert_eq!(table.at_step(0), 0.1);
        assert_eq!(table.at_step(7), 0.5);
        assert!(dtlz2_dynamic_make(cfg(GMode::OnePlusG, 1.5)).is_err());
    }

    #[test]
    fn static_and_scaled_variants() {
        let p = dtlz2_static_make(2, 1).unwrap();
        assert_eq!(p.evaluate(&[0.0, 0.5], 3.0).unwrap().0, vec![1.0, 0.0]);
        let scaled = dtlz2_scaled_make(2, 1, GSchedule::Table(vec![0.0, 1.0]), 1).unwrap();
        assert_eq!(scaled.evaluate(&[0.0, 0.5], 0.0).unwrap().0, vec![1.0, 0.0]);
        assert_eq!(scaled.evaluate(&[0.0, 0.5], 1.0).unwrap().0, vec![2.0, 0.0]);
    }

    #[test]
    fn validation() {
        assert!(dtlz2_dynamic_make(Dtlz2DynConfig { k: 1, ..Dtlz2DynConfig::default() }).is_err());
        assert!(dtlz2_dynamic_make(Dtlz2DynConfig { p: 0, ..Dtlz2DynConfig::default() }).is_err());
        assert!(dtlz2_static_make(1, 1).is_err());
    }
}
