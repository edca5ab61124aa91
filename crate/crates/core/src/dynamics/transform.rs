use std::fmt;
use std::sync::Arc;

/// One decision-space map `d_i(x, t)`.
pub type ParameterMap = Arc<dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync>;

/// One objective-space map `d_i(F(x), x, t)`; receives the full support value.
pub type ObjectiveMap = Arc<dyn Fn(&[f64], &[f64], f64) -> f64 + Send + Sync>;

/// Per-objective decision-space transforms `D = [d_1, ..., d_k]`.
#[derive(Clone)]
pub struct ParameterTransform {
    dimension: usize,
    maps: Vec<ParameterMap>,
    shared: bool,
}

impl ParameterTransform {
    pub fn new(dimension: usize, maps: Vec<ParameterMap>) -> Self {
        Self {
            dimension,
            maps,
            shared: false,
        }
    }

    /// The same map applied for every objective; the support is then
    /// evaluated once per point.
    pub fn shared<F>(dimension: usize, objectives: usize, f: F) -> Self
    where
        F: Fn(&[f64], f64) -> Vec<f64> + Send + Sync + 'static,
    {
        let map: ParameterMap = Arc::new(f);
        Self {
            dimension,
            maps: vec![map; objectives],
            shared: true,
        }
    }

    pub fn identity(dimension: usize, objectives: usize) -> Self {
        Self::shared(dimension, objectives, |x, _| x.to_vec())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn objectives(&self) -> usize {
        self.maps.len()
    }

    pub(crate) fn is_shared(&self) -> bool {
        self.shared
    }

    pub fn apply(&self, i: usize, x: &[f64], t: f64) -> Vec<f64> {
        (self.maps[i])(x, t)
    }
}

impl fmt::Debug for ParameterTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParameterTransform")
            .field("dimension", &self.dimension)
            .field("objectives", &self.maps.len())
            .finish()
    }
}

/// Per-objective objective-space transforms `D(F, x, t) = (d_i(F, x, t))_i`.
///
/// Covers both the wrapping shape `D(F(x, t))` and additive perturbations
/// `F(x) + D(x, t)`.
#[derive(Clone)]
pub struct ObjectiveTransform {
    maps: Vec<ObjectiveMap>,
}

impl ObjectiveTransform {
    pub fn new(maps: Vec<ObjectiveMap>) -> Self {
        Self { maps }
    }

    /// Builds `k` maps from one closure receiving the objective index.
    pub fn from_fn<F>(objectives: usize, f: F) -> Self
    where
        F: Fn(usize, &[f64], &[f64], f64) -> f64 + Send + Sync + 'static,
    {
        let f = Arc::new(f);
        let maps = (0..objectives)
            .map(|i| {
                let f = Arc::clone(&f);
                Arc::new(move |values: &[f64], x: &[f64], t: f64| f(i, values, x, t))
                    as ObjectiveMap
            })
            .collect();
        Self { maps }
    }

    pub fn identity(objectives: usize) -> Self {
        Self::from_fn(objectives, |i, values, _, _| values[i])
    }

    /// `d_i = f_i(x) + offset(x, t)`.
    pub fn additive<F>(objectives: usize, offset: F) -> Self
    where
        F: Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_fn(objectives, move |i, values, x, t| values[i] + offset(x, t))
    }

    pub fn objectives(&self) -> usize {
        self.maps.len()
    }

    pub fn apply(&self, i: usize, values: &[f64], x: &[f64], t: f64) -> f64 {
        (self.maps[i])(values, x, t)
    }
}

impl fmt::Debug for ObjectiveTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveTransform")
            .field("objectives", &self.maps.len())
            .finish()
    }
}
