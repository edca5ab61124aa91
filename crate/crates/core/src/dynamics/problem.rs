use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use super::history::{HistoryContext, ParamHistoryMap, StateHistory, SystemState, ValueHistoryMap};
use super::online::{EnvironmentSchedule, SupportFamily};
use super::transform::{ObjectiveTransform, ParameterTransform};
use super::{Encoding, SupportFunction};
use crate::error::{check_dim, Error, Result};
use crate::rng::Rng;
use crate::time::TimeModel;
use crate::types::{Bounds, Environment, ObjectiveVector};

/// Which component carries the dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    Static,
    First,
    Second,
    ThirdParam,
    ThirdFunc,
    Fourth,
}

impl Order {
    pub fn as_str(self) -> &'static str {
        match self {
            Order::Static => "static",
            Order::First => "first",
            Order::Second => "second",
            Order::ThirdParam => "third-param",
            Order::ThirdFunc => "third-func",
            Order::Fourth => "fourth",
        }
    }
}

/// Analytic or otherwise trusted front at time `t` with roughly `points` members.
pub type ReferenceFront = Arc<dyn Fn(f64, usize) -> Vec<ObjectiveVector> + Send + Sync>;

type StepCache = RwLock<BTreeMap<u64, (Environment, Arc<dyn SupportFunction>)>>;

struct Online {
    family: SupportFamily,
    schedule: Arc<dyn EnvironmentSchedule>,
    cache: StepCache,
}

enum Dynamics {
    Static,
    First(ParameterTransform),
    Second(ObjectiveTransform),
    ThirdParam {
        map: Arc<dyn ParamHistoryMap>,
        history: StateHistory,
    },
    ThirdFunc {
        map: Arc<dyn ValueHistoryMap>,
        history: StateHistory,
    },
    Fourth(Online),
}

/// A dynamic multi-objective problem: support function, dynamic component,
/// environment, clock and (for state-dependent orders) a state window.
pub struct DynamicProblem {
    name: String,
    support: Arc<dyn SupportFunction>,
    dynamics: Dynamics,
    environment: Environment,
    time: TimeModel,
    bounds: Bounds,
    step: u64,
    reference: Option<ReferenceFront>,
}

impl fmt::Debug for DynamicProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DynamicProblem")
            .field("name", &self.name)
            .field("order", &self.order())
            .field("dimension", &self.dimension())
            .field("objectives", &self.objectives())
            .field("step", &self.step)
            .finish()
    }
}

impl DynamicProblem {
    fn assemble(support: Arc<dyn SupportFunction>, dynamics: Dynamics, bounds: Bounds) -> Self {
        Self {
            name: String::from("custom"),
            support,
            dynamics,
            environment: Environment::default(),
            time: TimeModel::default(),
            bounds,
            step: 0,
            reference: None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_time_model(mut self, time: TimeModel) -> Result<Self> {
        time.validate()?;
        if let Dynamics::ThirdParam { history, .. } | Dynamics::ThirdFunc { history, .. } =
            &mut self.dynamics
        {
            history.restamp_initial(time.t0);
        }
        self.time = time;
        Ok(self)
    }

    /// Replaces the environment. For online problems this is the initial
    /// environment `sigma_0`; cached steps are discarded.
    pub fn with_environment(mut self, environment: Environment) -> Result<Self> {
        self.environment = environment;
        if let Dynamics::Fourth(online) = &self.dynamics {
            online.cache.write().expect("cache lock").clear();
            self.support = (online.family)(&self.environment)?;
        }
        Ok(self)
    }

    pub fn with_reference<F>(mut self, f: F) -> Self
    where
        F: Fn(f64, usize) -> Vec<ObjectiveVector> + Send + Sync + 'static,
    {
        self.reference = Some(Arc::new(f));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> Order {
        match self.dynamics {
            Dynamics::Static => Order::Static,
            Dynamics::First(_) => Order::First,
            Dynamics::Second(_) => Order::Second,
            Dynamics::ThirdParam { .. } => Order::ThirdParam,
            Dynamics::ThirdFunc { .. } => Order::ThirdFunc,
            Dynamics::Fourth(_) => Order::Fourth,
        }
    }

    pub fn dimension(&self) -> usize {
        self.bounds.dimension()
    }

    pub fn objectives(&self) -> usize {
        self.support.objectives()
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn encoding(&self) -> Encoding {
        self.support.encoding()
    }

    pub fn environment(&self) -> &Environment {
        &self.environment
    }

    pub fn time_model(&self) -> &TimeModel {
        &self.time
    }

    pub fn support(&self) -> &Arc<dyn SupportFunction> {
        &self.support
    }

    /// Number of advances applied so far.
    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn current_time(&self) -> f64 {
        self.time.time_of_step(self.step)
    }

    pub fn history(&self) -> Option<&StateHistory> {
        match &self.dynamics {
            Dynamics::ThirdParam { history, .. } | Dynamics::ThirdFunc { history, .. } => {
                Some(history)
            }
            _ => None,
        }
    }

    pub fn reference_front(&self, t: f64, points: usize) -> Option<Vec<ObjectiveVector>> {
        self.reference.as_ref().map(|f| f(t, points))
    }

    pub fn has_reference(&self) -> bool {
        self.reference.is_some()
    }

    /// `H(F, D, x, t)` at the current state. Pure: no state changes.
    pub fn evaluate(&self, x: &[f64], t: f64) -> Result<ObjectiveVector> {
        check_dim(self.dimension(), x.len())?;
        let env = &self.environment;
        let values = match &self.dynamics {
            Dynamics::Static => self.support.evaluate(x, env, self.time.t0)?,
            Dynamics::First(d) => {
                if d.is_shared() {
                    let y = d.apply(0, x, t);
                    self.support.evaluate(&y, env, t)?
                } else {
                    let mut out = Vec::with_capacity(d.objectives());
                    for i in 0..d.objectives() {
                        let y = d.apply(i, x, t);
                        out.push(self.support.evaluate(&y, env, t)?[i]);
                    }
                    ObjectiveVector(out)
                }
            }
            Dynamics::Second(d) => {
                let base = self.support.evaluate(x, env, t)?;
                ObjectiveVector(
                    (0..d.objectives())
                        .map(|i| d.apply(i, &base, x, t))
                        .collect(),
                )
            }
            Dynamics::ThirdParam { map, history } => {
                let y = map.apply(history, x)?;
                self.support.evaluate(&y, env, t)?
            }
            Dynamics::ThirdFunc { map, history } => {
                let ctx = HistoryContext {
                    window: history,
                    x,
                    env,
                    t,
                };
                let current = match &history.latest().landscape {
                    Some(landscape) => landscape.evaluate(x, env, t)?,
                    None => self.support.evaluate(x, env, t)?,
                };
                map.apply(current, &ctx)?
            }
            Dynamics::Fourth(online) => {
                let (env_t, support) = self.online_at(online, self.time.step_at(t), t)?;
                support.evaluate(x, &env_t, t)?
            }
        };
        check_dim(self.objectives(), values.len())?;
        values.check_finite()?;
        Ok(values)
    }

    fn online_at(
        &self,
        online: &Online,
        step: u64,
        t: f64,
    ) -> Result<(Environment, Arc<dyn SupportFunction>)> {
        if let Some(hit) = online.cache.read().expect("cache lock").get(&step) {
            return Ok(hit.clone());
        }
        let env = online.schedule.environment_at(&self.environment, step, t);
        let support = (online.family)(&env).map_err(|e| {
            Error::Config(format!("environment at step {step} rejected: {e}"))
        })?;
        if support.dimension() != self.dimension() || support.objectives() != self.objectives() {
            return Err(Error::Config(format!(
                "environment at step {step} changes the problem shape"
            )));
        }
        let entry = (env, support);
        online
            .cache
            .write()
            .expect("cache lock")
            .insert(step, entry.clone());
        Ok(entry)
    }

    /// Moves the system to the next change step.
    ///
    /// State-dependent orders record a new state (evolving its parameters
    /// with `rng`) and evict beyond their window; the other orders only move
    /// the step counter, since their evaluation is driven by `t` alone.
    pub fn advance(&mut self, rng: &mut Rng) -> Result<()> {
        let step = self.step + 1;
        let t = self.time.time_of_step(step);
        match &mut self.dynamics {
            Dynamics::ThirdParam { map, history } => {
                let params = map.next_params(history, rng);
                history.push(SystemState {
                    step,
                    t,
                    params,
                    landscape: None,
                });
            }
            Dynamics::ThirdFunc { map, history } => {
                let params = map.next_params(history, rng);
                let landscape = map.freeze(&self.support, &params)?;
                history.push(SystemState {
                    step,
                    t,
                    params,
                    landscape: Some(landscape),
                });
            }
            Dynamics::Static | Dynamics::First(_) | Dynamics::Second(_) | Dynamics::Fourth(_) => {}
        }
        self.step = step;
        Ok(())
    }
}

impl SupportFunction for DynamicProblem {
    fn dimension(&self) -> usize {
        DynamicProblem::dimension(self)
    }

    fn objectives(&self) -> usize {
        DynamicProblem::objectives(self)
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn encoding(&self) -> Encoding {
        DynamicProblem::encoding(self)
    }

    /// Nested use: the inner problem keeps its own environment and state.
    fn evaluate(&self, x: &[f64], _env: &Environment, t: f64) -> Result<ObjectiveVector> {
        DynamicProblem::evaluate(self, x, t)
    }
}

/// A problem whose evaluation ignores time.
pub fn static_problem(support: Arc<dyn SupportFunction>) -> DynamicProblem {
    let bounds = support.bounds().clone();
    DynamicProblem::assemble(support, Dynamics::Static, bounds)
}

/// First order: `H = [f_1(d_1(x, t)), ..., f_k(d_k(x, t))]`.
pub fn first_order_compose(
    support: Arc<dyn SupportFunction>,
    d: ParameterTransform,
) -> Result<DynamicProblem> {
    check_dim(support.dimension(), d.dimension())?;
    check_dim(support.objectives(), d.objectives())?;
    let bounds = support.bounds().clone();
    Ok(DynamicProblem::assemble(support, Dynamics::First(d), bounds))
}

/// Second order: `H = [d_1(F, x, t), ..., d_k(F, x, t)]`.
pub fn second_order_compose(
    support: Arc<dyn SupportFunction>,
    d: ObjectiveTransform,
) -> Result<DynamicProblem> {
    check_dim(support.objectives(), d.objectives())?;
    let bounds = support.bounds().clone();
    Ok(DynamicProblem::assemble(support, Dynamics::Second(d), bounds))
}

/// Third order, parameter history: `H = F(T(window, x))` over a window of
/// `window` states.
pub fn third_order_param(
    support: Arc<dyn SupportFunction>,
    map: Arc<dyn ParamHistoryMap>,
    window: usize,
) -> Result<DynamicProblem> {
    let initial = SystemState {
        step: 0,
        t: TimeModel::default().t0,
        params: map.initial_params(),
        landscape: None,
    };
    let history = StateHistory::new(window, initial)?;
    let bounds = map.input_bounds(support.as_ref());
    Ok(DynamicProblem::assemble(
        support,
        Dynamics::ThirdParam { map, history },
        bounds,
    ))
}

/// Third order, function history: `H = T(F(x), window)` where each stored
/// state carries a frozen landscape evaluator.
pub fn third_order_func(
    support: Arc<dyn SupportFunction>,
    map: Arc<dyn ValueHistoryMap>,
    window: usize,
) -> Result<DynamicProblem> {
    let params = map.initial_params();
    let landscape = map.freeze(&support, &params)?;
    check_dim(support.dimension(), landscape.dimension())?;
    check_dim(support.objectives(), landscape.objectives())?;
    let initial = SystemState {
        step: 0,
        t: TimeModel::default().t0,
        params,
        landscape: Some(landscape),
    };
    let history = StateHistory::new(window, initial)?;
    let bounds = support.bounds().clone();
    Ok(DynamicProblem::assemble(
        support,
        Dynamics::ThirdFunc { map, history },
        bounds,
    ))
}

/// Fourth order: `H = F_{D(sigma, t)}(x, t)`. Environments are produced per
/// change step from `initial` and cached by step index.
pub fn fourth_order_compose(
    family: SupportFamily,
    schedule: Arc<dyn EnvironmentSchedule>,
    initial: Environment,
) -> Result<DynamicProblem> {
    let support = family(&initial)?;
    let bounds = support.bounds().clone();
    let online = Online {
        family,
        schedule,
        cache: RwLock::new(BTreeMap::new()),
    };
    let mut problem = DynamicProblem::assemble(support, Dynamics::Fourth(online), bounds);
    problem.environment = initial;
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{
        FnSupport, IdentitySchedule, IgnoreHistory, OffsetWalk, StepParamSchedule, ValueMap,
    };

    fn twin_sphere(n: usize) -> Arc<dyn SupportFunction> {
        FnSupport::stationary(2, Bounds::uniform(n, -5.0, 5.0).unwrap(), |x| {
            let s: f64 = x.iter().map(|v| v * v).sum();
            vec![s, s]
        })
        .into_arc()
    }

    fn shifted_first_order() -> DynamicProblem {
        let time = TimeModel::new(1, 1.0).unwrap();
        let shift = time.clone();
        let d = ParameterTransform::new(
            2,
            vec![
                Arc::new(move |x: &[f64], t| vec![x[0] - shift.shift_at(t), x[1]]),
                Arc::new(|x: &[f64], _| x.to_vec()),
            ],
        );
        first_order_compose(twin_sphere(2), d)
            .unwrap()
            .with_time_model(time)
            .unwrap()
    }

    #[test]
    fn first_order_identity_matches_support() {
        let support = twin_sphere(2);
        let p = first_order_compose(support.clone(), ParameterTransform::identity(2, 2)).unwrap();
        for t in [0.0, 1.0, 7.5] {
            let x = [0.3, -1.2];
            assert_eq!(
                p.evaluate(&x, t).unwrap(),
                support.evaluate(&x, &Environment::default(), t).unwrap()
            );
        }
        assert_eq!(p.order(), Order::First);
    }

    #[test]
    fn first_order_shift_is_zero_at_origin_time() {
        let p = shifted_first_order();
        let x = [1.5, 0.5];
        let s = twin_sphere(2)
            .evaluate(&x, &Environment::default(), 0.0)
            .unwrap();
        assert_eq!(p.evaluate(&x, 0.0).unwrap(), s);
        // G(2) = 2 moves the first minimiser to x_1 = 2
        assert_eq!(p.evaluate(&[2.0, 0.0], 2.0).unwrap()[0], 0.0);
    }

    #[test]
    fn first_order_rejects_mismatched_transform() {
        assert!(first_order_compose(twin_sphere(2), ParameterTransform::identity(3, 2)).is_err());
        assert!(first_order_compose(twin_sphere(2), ParameterTransform::identity(2, 3)).is_err());
    }

    #[test]
    fn second_order_examples() {
        let p = second_order_compose(twin_sphere(1), ObjectiveTransform::additive(2, |_, _| 0.0))
            .unwrap();
        assert_eq!(p.evaluate(&[1.0], 3.0).unwrap().0, vec![1.0, 1.0]);

        let p = second_order_compose(twin_sphere(1), ObjectiveTransform::additive(2, |_, t| t))
            .unwrap();
        let x = [2f64.sqrt()];
        let v = p.evaluate(&x, 1.0).unwrap();
        assert!((v[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn second_order_rejects_wrong_arity() {
        assert!(second_order_compose(twin_sphere(1), ObjectiveTransform::identity(3)).is_err());
    }

    #[test]
    fn third_order_param_ignore_history_is_static() {
        let mut p = third_order_param(twin_sphere(2), Arc::new(IgnoreHistory), 2).unwrap();
        let x = [0.4, 0.1];
        let before = p.evaluate(&x, 0.0).unwrap();
        let mut rng = Rng::substream(1, "advance");
        for _ in 0..3 {
            p.advance(&mut rng).unwrap();
        }
        assert_eq!(p.evaluate(&x, 3.0).unwrap(), before);
        assert_eq!(p.history().unwrap().len(), 2);
    }

    #[test]
    fn offset_walk_starts_at_support() {
        let mut p = third_order_param(
            twin_sphere(2),
            Arc::new(OffsetWalk::new(vec![0.0, 0.0], 0.5)),
            3,
        )
        .unwrap();
        let x = [0.4, 0.1];
        let s = twin_sphere(2)
            .evaluate(&x, &Environment::default(), 0.0)
            .unwrap();
        assert_eq!(p.evaluate(&x, 0.0).unwrap(), s);

        let mut rng = Rng::substream(9, "advance");
        p.advance(&mut rng).unwrap();
        let mut replay = Rng::substream(9, "advance");
        let o = [0.5 * replay.normal(), 0.5 * replay.normal()];
        let y = [x[0] + o[0], x[1] + o[1]];
        let expected = y[0] * y[0] + y[1] * y[1];
        assert_eq!(p.evaluate(&x, 1.0).unwrap()[0], expected);
    }

    #[test]
    fn third_order_func_trivial_maps_are_static() {
        for map in [ValueMap::Current, ValueMap::WindowMean, ValueMap::PreviousLandscape] {
            let p = third_order_func(twin_sphere(2), Arc::new(map), 2).unwrap();
            let x = [0.7, -0.2];
            let s = twin_sphere(2)
                .evaluate(&x, &Environment::default(), 0.0)
                .unwrap();
            assert_eq!(p.evaluate(&x, 0.0).unwrap(), s, "{map:?}");
        }
    }

    #[test]
    fn fourth_order_identity_schedule_is_static() {
        let family: SupportFamily = Arc::new(|_env: &Environment| Ok(twin_sphere(1)));
        let p = fourth_order_compose(family, Arc::new(IdentitySchedule), Environment::new(3))
            .unwrap();
        assert_eq!(p.evaluate(&[1.5], 0.0).unwrap(), p.evaluate(&[1.5], 9.0).unwrap());
    }

    #[test]
    fn fourth_order_weight_swap() {
        let family: SupportFamily = Arc::new(|env: &Environment| {
            let w = env.param("w").unwrap_or(1.0);
            Ok(FnSupport::stationary(2, Bounds::uniform(1, -2.0, 2.0).unwrap(), move |x| {
                vec![w * x[0] * x[0], w * x[0] * x[0]]
            })
            .into_arc())
        });
        let schedule = StepParamSchedule {
            name: "w".into(),
            values: vec![1.0, 2.0],
        };
        let p = fourth_order_compose(family, Arc::new(schedule), Environment::new(0)).unwrap();
        assert_eq!(p.evaluate(&[1.0], 0.0).unwrap()[0], 1.0);
        assert_eq!(p.evaluate(&[1.0], 1.0).unwrap()[0], 2.0);
        assert_eq!(p.evaluate(&[1.0], 4.0).unwrap()[0], 2.0);
    }

    #[test]
    fn fourth_order_rejected_environment_is_config_error() {
        let family: SupportFamily = Arc::new(|env: &Environment| {
            if env.param("w").unwrap_or(1.0) > 1.5 {
                return Err(Error::Config("weight too large".into()));
            }
            Ok(twin_sphere(1))
        });
        let schedule = StepParamSchedule {
            name: "w".into(),
            values: vec![1.0, 2.0],
        };
        let p = fourth_order_compose(family, Arc::new(schedule), Environment::new(0)).unwrap();
        assert!(p.evaluate(&[1.0], 0.0).is_ok());
        assert!(matches!(p.evaluate(&[1.0], 1.0), Err(Error::Config(_))));
    }

    #[test]
    fn static_problem_ignores_time() {
        let support = FnSupport::new(2, Bounds::uniform(1, 0.0, 1.0).unwrap(), |x, _, t| {
            vec![x[0] + t, x[0] - t]
        })
        .into_arc();
        let p = static_problem(support);
        assert_eq!(p.evaluate(&[0.5], 0.0).unwrap(), p.evaluate(&[0.5], 10.0).unwrap());
    }

    #[test]
    fn advance_on_independent_orders_only_moves_time() {
        let mut p = shifted_first_order();
        let mut rng = Rng::substream(0, "advance");
        let x = [0.9, 0.1];
        p.advance(&mut rng).unwrap();
        p.advance(&mut rng).unwrap();
        assert_eq!(p.step(), 2);
        assert_eq!(p.current_time(), 2.0);
        assert_eq!(
            p.evaluate(&x, p.current_time()).unwrap(),
            shifted_first_order().evaluate(&x, 2.0).unwrap()
        );
    }

    #[test]
    fn nested_composition_reports_outer_order() {
        let inner = shifted_first_order();
        let outer =
            second_order_compose(Arc::new(inner), ObjectiveTransform::additive(2, |_, t| t))
                .unwrap();
        assert_eq!(outer.order(), Order::Second);
        let v = outer.evaluate(&[1.0, 0.0], 1.0).unwrap();
        // inner: (1 - 1)^2 = 0 and 1^2 = 1, plus t = 1
        assert_eq!(v.0, vec![1.0, 2.0]);
    }

    #[test]
    fn evaluate_rejects_wrong_dimension() {
        let p = shifted_first_order();
        assert!(matches!(
            p.evaluate(&[1.0], 0.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
