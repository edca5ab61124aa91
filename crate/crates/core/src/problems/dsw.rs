//! Dynamic sphere pair driven by a decision-space shift `G(t)`.

use std::sync::Arc;

use crate::dynamics::{first_order_compose, DynamicProblem, FnSupport, ParameterTransform};
use crate::error::{Error, Result};
use crate::time::TimeModel;
use crate::types::Bounds;

use super::squared_norm;

/// Coefficients of the two shifted spheres.
///
/// With `corrected == false` the maps are taken as written:
/// `d_1 = a11 x_1 + a12 x_1 - b1 G`, `d_2 = a21 x_1 + a22 x_1 - b1 G - 2`.
/// With `corrected == true`: `d_1 = a11 x_1 + a12 x_2 - b1 G` and
/// `d_2 = a21 x_1 + a22 x_2 - b2 G - 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct DswConfig {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
    pub b1: f64,
    pub b2: f64,
    pub n: usize,
    /// Severity step `s`.
    pub s: f64,
    /// Change period `tau_T`.
    pub period: u64,
    /// Problem time of the first generation.
    pub t0: f64,
    pub corrected: bool,
    pub lower: f64,
    pub upper: f64,
}

impl Default for DswConfig {
    fn default() -> Self {
        Self {
            a11: 1.0,
            a12: 0.0,
            a21: 1.0,
            a22: 0.0,
            b1: 1.0,
            b2: 1.0,
            n: 2,
            s: 1.0,
            period: 10,
            t0: 0.0,
            corrected: false,
            lower: -5.0,
            upper: 5.0,
        }
    }
}

impl DswConfig {
    fn first_coordinates(&self, x: &[f64], g: f64) -> (f64, f64) {
        let x1 = x[0];
        if self.corrected {
            let x2 = x.get(1).copied().unwrap_or(0.0);
            (
                self.a11 * x1 + self.a12 * x2 - self.b1 * g,
                self.a21 * x1 + self.a22 * x2 - self.b2 * g - 2.0,
            )
        } else {
            (
                self.a11 * x1 + self.a12 * x1 - self.b1 * g,
                self.a21 * x1 + self.a22 * x1 - self.b1 * g - 2.0,
            )
        }
    }
}

/// First-order twin-sphere problem.
pub fn dsw_make(cfg: DswConfig) -> Result<DynamicProblem> {
    if cfg.n == 0 {
        return Err(Error::Config("dsw dimension must be at least 1".into()));
    }
    let time = TimeModel::starting_at(cfg.period, cfg.s, cfg.t0)?;
    let bounds = Bounds::uniform(cfg.n, cfg.lower, cfg.upper)?;
    let support = FnSupport::stationary(2, bounds, |x| {
        let s = squared_norm(x);
        vec![s, s]
    });

    let cfg = Arc::new(cfg);
    let (c1, t1) = (Arc::clone(&cfg), time.clone());
    let (c2, t2) = (Arc::clone(&cfg), time.clone());
    let d = ParameterTransform::new(
        cfg.n,
        vec![
            Arc::new(move |x: &[f64], t| {
                let mut y = x.to_vec();
                y[0] = c1.first_coordinates(x, t1.shift_at(t)).0;
                y
            }),
            Arc::new(move |x: &[f64], t| {
                let mut y = x.to_vec();
                y[0] = c2.first_coordinates(x, t2.shift_at(t)).1;
                y
            }),
        ],
    );
    let mut problem = first_order_compose(Arc::new(support), d)?
        .with_name("dsw")
        .with_time_model(time)?;

    // verbatim maps with a shared nonzero slope keep the front fixed at
    // (u^2, (2 - u)^2), u in [0, 2]
    let (slope1, slope2) = (cfg.a11 + cfg.a12, cfg.a21 + cfg.a22);
    if !cfg.corrected && slope1 == slope2 && slope1 != 0.0 {
        problem = problem.with_reference(|_, points| super::two_sphere_front(points));
    }
    Ok(problem)
}


#[cfg(test)]
mod tests {
    use super::*;

    fn unit_cfg() -> DswConfig {
        DswConfig {
            a11: 1.0,
            a12: 0.0,
            a21: 1.0,
            a22: 0.0,
            b1: 1.0,
            period: 1,
            ..DswConfig::default()
        }
    }

    #[test]
    fn examples_at_g_zero_and_two() {
        let p = dsw_make(unit_cfg()).unwrap();
        assert_eq!(p.evaluate(&[0.0, 0.0], 0.0).unwrap()[0], 0.0);
        assert_eq!(p.evaluate(&[2.0, 0.0], 0.0).unwrap()[1], 0.0);
        // period 1, s = 1: t = 2 means G = 2
        assert_eq!(p.evaluate(&[2.0, 0.0], 2.0).unwrap()[0], 0.0);
    }

    #[test]
    fn verbatim_form_doubles_up_on_x1() {
        let cfg = DswConfig {
            a11: 1.0,
            a12: 2.0,
            a21: 0.5,
            a22: 0.5,
            b1: 1.0,
            b2: 7.0,
            ..unit_cfg()
        };
        let p = dsw_make(cfg).unwrap();
        let x = [1.0, 0.5];
        let v = p.evaluate(&x, 1.0).unwrap();
        // d1 = 3 x1 - 1 = 2, d2 = x1 - 1 - 2 = -2; b2 unused
        assert_eq!(v.0, vec![4.0 + 0.25, 4.0 + 0.25]);
    }

    #[test]
    fn corrected_form_uses_x2_and_b2() {
        let cfg = DswConfig {
            a11: 1.0,
            a12: 2.0,
            a21: 0.5,
            a22: 0.5,
            b1: 1.0,
            b2: 3.0,
            corrected: true,
            ..unit_cfg()
        };
        let p = dsw_make(cfg).unwrap();
        let v = p.evaluate(&[1.0, 0.5], 1.0).unwrap();
        // d1 = 1 + 1 - 1 = 1, d2 = 0.5 + 0.25 - 3 - 2 = -4.25
        assert_eq!(v.0, vec![1.0 + 0.25, 4.25 * 4.25 + 0.25]);
    }

    #[test]
    fn zero_severity_is_time_invariant() {
        for cfg in [
            DswConfig { b1: 0.0, ..unit_cfg() },
            DswConfig { s: 0.0, ..unit_cfg() },
        ] {
            let p = dsw_make(cfg).unwrap();
            for x in [[0.3, -1.0], [2.5, 4.0], [-5.0, 5.0]] {
                assert_eq!(p.evaluate(&x, 0.0).unwrap(), p.evaluate(&x, 100.0).unwrap());
            }
        }
    }

    #[test]
    fn reference_only_for_shared_slope() {
        assert!(dsw_make(unit_cfg()).unwrap().has_reference());
        let skew = DswConfig { a21: 2.0, ..unit_cfg() };
        assert!(!dsw_make(skew).unwrap().has_reference());
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(dsw_make(DswConfig { n: 0, ..unit_cfg() }).is_err());
        assert!(dsw_make(DswConfig { period: 0, ..unit_cfg() }).is_err());
    }
}
