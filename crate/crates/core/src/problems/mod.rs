//! Benchmark instances, one per dynamic order, plus the static two-sphere
//! problem used as an optimiser baseline.

mod dsw;
mod dtlz2;
mod mnk;
mod peaks;

use std::sync::Arc;

use crate::dynamics::{static_problem, DynamicProblem, FnSupport};
use crate::error::Result;
use crate::types::{Bounds, ObjectiveVector};

pub use dsw::{dsw_make, DswConfig};
pub use dtlz2::{
    dtlz2_dynamic_make, dtlz2_g, dtlz2_scaled_make, dtlz2_static_make, dtlz2_support,
    Dtlz2DynConfig, GMode, GSchedule,
};
pub use mnk::{mnk_make, MnkConfig, MnkLandscape, Neighborhood};
pub use peaks::{
    moving_peaks_landscape, moving_peaks_make, Dependency, Peak, PeakSet, PeakWalk,
    WalkSeverity,
};

/// Problem names accepted by the scenario runner.
pub const PROBLEM_NAMES: [&str; 5] = ["dsw", "dtlz2-dynamic", "moving-peaks", "mnk", "two-sphere"];

/// `G = s * floor(tau / tau_T)`.
pub fn g_step(tau: u64, severity: f64, period: u64) -> f64 {
    severity * (tau / period.max(1)) as f64
}

pub(crate) fn squared_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Static bi-objective pair `f1 = |x|^2`, `f2 = |x - 2 e_1|^2`.
///
/// Its Pareto set is the segment `x_1 in [0, 2]`, `x_i = 0` otherwise, with
/// front `sqrt(f1) + sqrt(f2) = 2`.
pub fn two_sphere_make(n: usize, lower: f64, upper: f64) -> Result<DynamicProblem> {
    let bounds = Bounds::uniform(n, lower, upper)?;
    let support = FnSupport::stationary(2, bounds, |x| {
        let rest = squared_norm(&x[1..]);
        vec![x[0] * x[0] + rest, (x[0] - 2.0).powi(2) + rest]
    });
    Ok(static_problem(Arc::new(support))
        .with_name("two-sphere")
        .with_reference(|_, points| two_sphere_front(points)))
}

/// `points` samples of `(u^2, (2 - u)^2)` for `u` evenly spaced on `[0, 2]`.
pub fn two_sphere_front(points: usize) -> Vec<ObjectiveVector> {
    let last = points.saturating_sub(1).max(1) as f64;
    (0..points)
        .map(|i| {
            let u = 2.0 * i as f64 / last;
            ObjectiveVector(vec![u * u, (2.0 - u).powi(2)])
        })
        .collect()
}
