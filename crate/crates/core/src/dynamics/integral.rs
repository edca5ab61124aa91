use super::DynamicProblem;
use crate::error::{Error, Result};
use crate::types::ObjectiveVector;

/// Componentwise left-Riemann sum of `F(x(t), t)` over `[t0, t_end]`:
/// `dt * sum_{m < steps} F(x(t_m), t_m)` with `t_m = t0 + m * dt`.
///
/// Sums are compensated (Neumaier) and scaled by the interval length last.
pub fn trajectory_integral<T>(
    problem: &DynamicProblem,
    trajectory: T,
    t0: f64,
    t_end: f64,
    steps: usize,
) -> Result<ObjectiveVector>
where
    T: Fn(f64) -> Option<Vec<f64>>,
{
    if !(t0 <= t_end) {
        return Err(Error::Config(format!("t0 = {t0} exceeds t_end = {t_end}")));
    }
    if steps == 0 {
        return Err(Error::Config("at least one quadrature step is required".into()));
    }
    let span = t_end - t0;
    let k = problem.objectives();
    let mut sum = vec![0.0f64; k];
    let mut carry = vec![0.0f64; k];
    for m in 0..steps {
        let t = t0 + span * m as f64 / steps as f64;
        let x = trajectory(t).ok_or(Error::Trajectory { t })?;
        let f = problem.evaluate(&x, t)?;
        for i in 0..k {
            let (s, c) = neumaier(sum[i], carry[i], f[i]);
            sum[i] = s;
            carry[i] = c;
        }
    }
    Ok(ObjectiveVector(
        sum.iter()
            .zip(&carry)
            .map(|(s, c)| (s + c) * span / steps as f64)
            .collect(),
    ))
}

fn neumaier(sum: f64, carry: f64, value: f64) -> (f64, f64) {
    let t = sum + value;
    let c = if sum.abs() >= value.abs() {
        (sum - t) + value
    } else {
        (value - t) + sum
    };
    (t, carry + c)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::dynamics::{second_order_compose, static_problem, FnSupport, ObjectiveTransform};
    use crate::types::Bounds;

    fn time_integrand() -> DynamicProblem {
        let support = FnSupport::stationary(2, Bounds::uniform(1, 0.0, 1.0).unwrap(), |_| {
            vec![0.0, 0.0]
        });
        second_order_compose(Arc::new(support), ObjectiveTransform::from_fn(2, |_, _, _, t| t))
            .unwrap()
    }

    #[test]
    fn riemann_sum_of_t() {
        let p = time_integrand();
        let x = |_: f64| Some(vec![0.5]);
        let two = trajectory_integral(&p, x, 0.0, 1.0, 2).unwrap();
        assert_eq!(two[0], 0.25);
        let thousand = trajectory_integral(&p, x, 0.0, 1.0, 1000).unwrap();
        assert!((thousand[0] - 0.4995).abs() < 1e-15);
    }

    #[test]
    fn constant_problem_is_exact() {
        let support = FnSupport::stationary(2, Bounds::uniform(1, -1.0, 1.0).unwrap(), |x| {
            vec![x[0] * x[0], 3.0]
        });
        let p = static_problem(Arc::new(support));
        let v = trajectory_integral(&p, |_| Some(vec![0.5]), 1.0, 4.0, 7).unwrap();
        assert_eq!(v.0, vec![0.75, 9.0]);
    }

    #[test]
    fn undefined_trajectory_is_an_input_error() {
        let p = time_integrand();
        let r = trajectory_integral(&p, |t| (t < 0.5).then(|| vec![0.0]), 0.0, 1.0, 4);
        assert!(matches!(r, Err(Error::Trajectory { t }) if t == 0.5));
    }

    #[test]
    fn rejects_bad_interval() {
        let p = time_integrand();
        assert!(trajectory_integral(&p, |_| Some(vec![0.0]), 1.0, 0.0, 4).is_err());
        assert!(trajectory_integral(&p, |_| Some(vec![0.0]), 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn additive_over_adjacent_intervals() {
        let p = time_integrand();
        let x = |_: f64| Some(vec![0.1]);
        let a = trajectory_integral(&p, x, 0.0, 0.4, 40).unwrap();
        let b = trajectory_integral(&p, x, 0.4, 1.0, 60).unwrap();
        let whole = trajectory_integral(&p, x, 0.0, 1.0, 100).unwrap();
        assert!((a[0] + b[0] - whole[0]).abs() < 1e-12);
    }
}
