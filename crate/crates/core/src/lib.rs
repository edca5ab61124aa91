//! Dynamic multi-objective optimisation problems: construction by dynamic
//! order, benchmark instances, Pareto ground truth, change classification
//! and a baseline dynamic evolutionary optimiser.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod optimizer;
pub mod pareto;
pub mod problems;
pub mod rng;
pub mod scenario;
pub mod time;
pub mod types;

pub use error::{Error, Result};
pub use rng::Rng;
pub use time::{time_of, TimeModel, TimePoint};
pub use types::{clamp_to_bounds, Bounds, DecisionVector, Environment, ObjectiveVector};
