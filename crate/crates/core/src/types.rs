//! Value types shared by every module: decision and objective vectors, box
//! bounds and the instance environment.

use std::collections::BTreeMap;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::rng::Rng;

/// A point in the decision space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionVector(pub Vec<f64>);

/// A point in the objective space. All objectives are minimised.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector(pub Vec<f64>);

macro_rules! vector_newtype {
    ($name:ident) => {
        impl $name {
            pub fn new(values: Vec<f64>) -> Self {
                Self(values)
            }

            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }
        }

        impl Deref for $name {
            type Target = [f64];

            fn deref(&self) -> &[f64] {
                &self.0
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(values: Vec<f64>) -> Self {
                Self(values)
            }
        }

        impl AsRef<[f64]> for $name {
            fn as_ref(&self) -> &[f64] {
                &self.0
            }
        }
    };
}

vector_newtype!(DecisionVector);
vector_newtype!(ObjectiveVector);

impl ObjectiveVector {
    /// Rejects vectors carrying NaN or infinite components.
    pub fn check_finite(&self) -> Result<()> {
        match self.0.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite { index }),
            None => Ok(()),
        }
    }
}

/// Axis-aligned box `[lower_i, upper_i]` over the decision space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::EmptyInput("bounds"));
        }
        for (index, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            // NaN fails this comparison too
            if !(lo <= hi) {
                return Err(Error::InvalidBounds {
                    index,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval repeated over `n` dimensions.
    pub fn uniform(n: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; n], vec![upper; n])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| 0.5 * (lo + hi))
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    pub fn check_contains(&self, x: &[f64]) -> Result<()> {
        check_dim(self.dimension(), x.len())?;
        for (index, (&value, (&lower, &upper))) in
            x.iter().zip(self.lower.iter().zip(&self.upper)).enumerate()
        {
            if !(lower <= value && value <= upper) {
                return Err(Error::OutOfBounds {
                    index,
                    value,
                    lower,
                    upper,
                });
            }
        }
        Ok(())
    }

    /// Concatenates two boxes into one over the joint space.
    pub fn concat(&self, other: &Bounds) -> Bounds {
        let mut lower = self.lower.clone();
        let mut upper = self.upper.clone();
        lower.extend_from_slice(&other.lower);
        upper.extend_from_slice(&other.upper);
        Bounds { lower, upper }
    }

    /// Uniform sample inside the box.
    pub fn sample(&self, rng: &mut Rng) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| if lo == hi { lo } else { rng.uniform(lo, hi) })
            .collect()
    }
}

/// Clamps every component of `x` into the box; in-range components are
/// returned unchanged.
pub fn clamp_to_bounds(x: &[f64], bounds: &Bounds) -> Result<DecisionVector> {
    check_dim(bounds.dimension(), x.len())?;
    Ok(DecisionVector(
        x.iter()
            .zip(bounds.lower.iter().zip(&bounds.upper))
            .map(|(&v, (&lo, &hi))| v.clamp(lo, hi))
            .collect(),
    ))
}

/// Instance-level constants of a problem: a seed plus named real parameters.
///
/// Values are immutable. Online problems produce a fresh environment per
/// change step through [`Environment::with_param`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    seed: u64,
    params: BTreeMap<String, f64>,
}

impl Environment {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            params: BTreeMap::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// Returns a new environment with `name` set to `value`.
    pub fn with_param(&self, name: impl Into<String>, value: f64) -> Self {
        let mut params = self.params.clone();
        params.insert(name.into(), value);
        Self {
            seed: self.seed,
            params,
        }
    }

    /// Deterministic substream for `label` derived from this environment's seed.
    pub fn rng(&self, label: &str) -> Rng {
        Rng::substream(self.seed, label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn clamp_examples() {
        let unit = Bounds::uniform(1, 0.0, 1.0).unwrap();
        assert_eq!(clamp_to_bounds(&[0.5], &unit).unwrap().0, vec![0.5]);
        assert_eq!(clamp_to_bounds(&[1.5], &unit).unwrap().0, vec![1.0]);
        let square = Bounds::uniform(2, 0.0, 1.0).unwrap();
        assert_eq!(
            clamp_to_bounds(&[-2.0, 0.3], &square).unwrap().0,
            vec![0.0, 0.3]
        );
    }

    #[test]
    fn clamp_rejects_dimension_mismatch() {
        let unit = Bounds::uniform(2, 0.0, 1.0).unwrap();
        assert!(matches!(
            clamp_to_bounds(&[0.5], &unit),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn bounds_validation() {
        assert!(Bounds::new(vec![1.0], vec![0.0]).is_err());
        assert!(Bounds::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(Bounds::new(vec![], vec![]).is_err());
        assert!(Bounds::new(vec![0.0], vec![0.0]).is_ok());
        assert!(Bounds::new(vec![f64::NAN], vec![0.0]).is_err());
    }

    #[test]
    fn environment_is_copy_on_write() {
        let base = Environment::new(7).with_param("w", 1.0);
        let next = base.with_param("w", 2.0);
        assert_eq!(base.param("w"), Some(1.0));
        assert_eq!(next.param("w"), Some(2.0));
        assert_eq!(next.seed(), 7);
    }

    proptest! {
        #[test]
        fn clamp_is_idempotent(x in prop::collection::vec(-10.0f64..10.0, 3)) {
            let b = Bounds::new(vec![-1.0, 0.0, 2.0], vec![1.0, 0.5, 3.0]).unwrap();
            let once = clamp_to_bounds(&x, &b).unwrap();
            let twice = clamp_to_bounds(&once, &b).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert!(b.contains(&once));
        }
    }
}
