//! Multi-objective NK landscapes whose interaction tables are partially
//! regenerated at every change step.

use std::sync::Arc;

use crate::dynamics::{
    fourth_order_compose, DynamicProblem, Encoding, SupportFamily, SupportFunction,
};
use crate::error::{check_dim, Error, Result};
use crate::rng::Rng;
use crate::types::{Bounds, Environment, ObjectiveVector};

/// Environment parameter carrying the change step.
pub const STEP_PARAM: &str = "mnk.step";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Neighborhood {
    /// `K` distinct random bits per (objective, bit), seeded.
    Random,
    /// The `K` bits following `i`, wrapping around.
    Adjacent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MnkConfig {
    /// Objectives `M`.
    pub objectives: usize,
    /// Bit-string length `N`.
    pub bits: usize,
    /// Epistatic neighbours per bit `K`.
    pub epistasis: usize,
    /// Fraction of table entries redrawn per change step.
    pub rho: f64,
    pub neighborhood: Neighborhood,
    pub period: u64,
}

impl Default for MnkConfig {
    fn default() -> Self {
        Self {
            objectives: 2,
            bits: 12,
            epistasis: 2,
            rho: 0.1,
            neighborhood: Neighborhood::Random,
            period: 10,
        }
    }
}

impl MnkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.objectives == 0 || self.bits == 0 {
            return Err(Error::Config("MNK needs M >= 1 and N >= 1".into()));
        }
        if self.epistasis >= self.bits {
            return Err(Error::Config(format!(
                "K = {} must be at most N - 1 = {}",
                self.epistasis,
                self.bits - 1
            )));
        }
        if self.epistasis > 20 {
            return Err(Error::Config("K above 20 makes tables impractically large".into()));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::Config("rho must lie in [0, 1]".into()));
        }
        Ok(())
    }

    fn patterns(&self) -> usize {
        1 << (self.epistasis + 1)
    }

    pub fn table_len(&self) -> usize {
        self.objectives * self.bits * self.patterns()
    }
}

/// One frozen MNK landscape.
#[derive(Clone, Debug)]
pub struct MnkLandscape {
    cfg: MnkConfig,
    bounds: Bounds,
    /// `neighbors[m][i]`: the `K` bits interacting with bit `i` in objective `m`.
    neighbors: Vec<Vec<Vec<usize>>>,
    /// Flattened `[m][i][pattern]`, values in `[0, 1)`.
    tables: Vec<f64>,
}

impl MnkLandscape {
    /// Landscape at step 0 for `seed`.
    pub fn initial(cfg: &MnkConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut rng = Rng::substream(seed, "mnk-neighbors");
        let neighbors = (0..cfg.objectives)
            .map(|_| {
                (0..cfg.bits)
                    .map(|i| match cfg.neighborhood {
                        Neighborhood::Random => rng
                            .sample_indices(cfg.bits - 1, cfg.epistasis)
                            .into_iter()
                            .map(|j| if j >= i { j + 1 } else { j })
                            .collect(),
                        Neighborhood::Adjacent => {
                            (1..=cfg.epistasis).map(|d| (i + d) % cfg.bits).collect()
                        }
                    })
                    .collect()
            })
            .collect();
        let mut rng = Rng::substream(seed, "mnk-tables");
        let tables = (0..cfg.table_len()).map(|_| rng.unit()).collect();
        Ok(Self {
            cfg: cfg.clone(),
            bounds: Bounds::uniform(cfg.bits, 0.0, 1.0)?,
            neighbors,
            tables,
        })
    }

    /// Landscape after `step` regenerations, replayed from the seed.
    pub fn at_step(cfg: &MnkConfig, seed: u64, step: u64) -> Result<Self> {
        let mut landscape = Self::initial(cfg, seed)?;
        let mut rng = Rng::substream(seed, "mnk-retable");
        for _ in 0..step {
            landscape.retable(&mut rng);
        }
        Ok(landscape)
    }

    /// Redraws `round(rho * len)` randomly chosen table entries.
    pub fn retable(&mut self, rng: &mut Rng) {
        let count = (self.cfg.rho * self.tables.len() as f64).round() as usize;
        if count == 0 {
            return;
        }
        for idx in rng.sample_indices(self.tables.len(), count) {
            self.tables[idx] = rng.unit();
        }
    }

    pub fn tables(&self) -> &[f64] {
        &self.tables
    }

    pub fn neighbors(&self) -> &[Vec<Vec<usize>>] {
        &self.neighbors
    }

    /// Fitness per objective in `[0, 1]`, to be maximised:
    /// `f_m = (1/N) sum_i table_m[i][pattern(bit i, its neighbours)]`.
    pub fn fitness(&self, bits: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.cfg.bits, bits.len())?;
        let on: Vec<usize> = bits.iter().map(|&b| usize::from(b >= 0.5)).collect();
        let patterns = self.cfg.patterns();
        Ok((0..self.cfg.objectives)
            .map(|m| {
                let total: f64 = (0..self.cfg.bits)
                    .map(|i| {
                        let pattern = self.neighbors[m][i]
                            .iter()
                            .enumerate()
                            .fold(on[i], |acc, (slot, &j)| acc | (on[j] << (slot + 1)));
                        self.tables[(m * self.cfg.bits + i) * patterns + pattern]
                    })
                    .sum();
                total / self.cfg.bits as f64
            })
            .collect())
    }
}

impl SupportFunction for MnkLandscape {
    fn dimension(&self) -> usize {
        self.cfg.bits
    }

    fn objectives(&self) -> usize {
        self.cfg.objectives
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn encoding(&self) -> Encoding {
        Encoding::Binary
    }

    /// Negated fitness, for minimisation.
    fn evaluate(&self, x: &[f64], _env: &Environment, _t: f64) -> Result<ObjectiveVector> {
        Ok(ObjectiveVector(
            self.fitness(x)?.into_iter().map(|f| -f).collect(),
        ))
    }
}

/// Fourth-order MNK problem: the environment of step `s` carries
/// [`STEP_PARAM`] = `s`, and its landscape has had `s` regenerations.
pub fn mnk_make(cfg: MnkConfig, seed: u64) -> Result<DynamicProblem> {
    cfg.validate()?;
    let period = cfg.period;
    let family_cfg = cfg.clone();
    let family: SupportFamily = Arc::new(move |env: &Environment| {
        let step = env.param(STEP_PARAM).unwrap_or(0.0);
        if !(step >= 0.0) || step.fract() != 0.0 {
            return Err(Error::Config(format!("invalid MNK step {step}")));
        }
        Ok(Arc::new(MnkLandscape::at_step(&family_cfg, env.seed(), step as u64)?)
            as Arc<dyn SupportFunction>)
    });
    let schedule = Arc::new(|base: &Environment, step: u64, _t: f64| {
        base.with_param(STEP_PARAM, step as f64)
    });
    let initial = Environment::new(seed).with_param(STEP_PARAM, 0.0);
    fourth_order_compose(family, schedule, initial)?
        .with_name("mnk")
        .with_time_model(crate::time::TimeModel::new(period, 0.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits_of(value: usize, n: usize) -> Vec<f64> {
        (0..n).map(|i| ((value >> i) & 1) as f64).collect()
    }

    #[test]
    fn single_bit_single_objective() {
        let cfg = MnkConfig {
            objectives: 1,
            bits: 1,
            epistasis: 0,
            ..MnkConfig::default()
        };
        let l = MnkLandscape::initial(&cfg, 11).unwrap();
        assert_eq!(l.tables().len(), 2);
        for b in [0.0, 1.0] {
            let f = l.fitness(&[b]).unwrap()[0];
            assert_eq!(f, l.tables()[b as usize]);
            assert!((0.0..=1.0).contains(&f));
        }
    }

    #[test]
    fn table_shape_and_range() {
        let cfg = MnkConfig::default();
        let l = MnkLandscape::initial(&cfg, 1).unwrap();
        assert_eq!(l.tables().len(), 2 * 12 * 8);
        assert!(l.tables().iter().all(|v| (0.0..1.0).contains(v)));
        for per_objective in l.neighbors() {
            for (i, n) in per_objective.iter().enumerate() {
                assert_eq!(n.len(), 2);
                assert!(!n.contains(&i));
                assert_ne!(n[0], n[1]);
            }
        }
    }

    #[test]
    fn adjacent_neighbourhood_wraps() {
        let cfg = MnkConfig {
            neighborhood: Neighborhood::Adjacent,
            bits: 4,
            epistasis: 2,
            ..MnkConfig::default()
        };
        let l = MnkLandscape::initial(&cfg, 1).unwrap();
        assert_eq!(l.neighbors()[0][3], vec![0, 1]);
    }

    #[test]
    fn fitness_matches_hand_lookup() {
        let cfg = MnkConfig {
            objectives: 1,
            bits: 3,
            epistasis: 1,
            neighborhood: Neighborhood::Adjacent,
            ..MnkConfig::default()
        };
        let l = MnkLandscape::initial(&cfg, 5).unwrap();
        // bits 1,0,1: bit0 pattern = 1 | bit1 << 1 = 1; bit1 = 0 | 1 << 1 = 2; bit2 = 1 | 1 << 1 = 3
        let t = l.tables();
        let expected = (t[1] + t[4 + 2] + t[8 + 3]) / 3.0;
        assert_eq!(l.fitness(&[1.0, 0.0, 1.0]).unwrap()[0], expected);
    }

    #[test]
    fn wrong_length_rejected() {
        let problem = mnk_make(MnkConfig::default(), 3).unwrap();
        assert!(matches!(
            problem.evaluate(&[0.0; 5], 0.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_rho_is_time_invariant() {
        let problem = mnk_make(MnkConfig { rho: 0.0, ..MnkConfig::default() }, 3).unwrap();
        let mut rng = Rng::substream(0, "probe");
        for _ in 0..100 {
            let x = bits_of(rng.index(1 << 12), 12);
            assert_eq!(problem.evaluate(&x, 0.0).unwrap(), problem.evaluate(&x, 5.0).unwrap());
        }
    }

    #[test]
    fn full_rho_changes_tables() {
        let cfg = MnkConfig { rho: 1.0, ..MnkConfig::default() };
        let a = MnkLandscape::at_step(&cfg, 9, 0).unwrap();
        let b = MnkLandscape::at_step(&cfg, 9, 1).unwrap();
        assert!(a.tables().iter().zip(b.tables()).all(|(x, y)| x != y));
        assert_eq!(a.neighbors(), b.neighbors());
    }

    #[test]
    fn invalid_configs() {
        let base = MnkConfig::default();
        assert!(MnkConfig { epistasis: 12, ..base.clone() }.validate().is_err());
        assert!(MnkConfig { rho: 1.5, ..base.clone() }.validate().is_err());
        assert!(MnkConfig { bits: 0, ..base }.validate().is_err());
    }
}
