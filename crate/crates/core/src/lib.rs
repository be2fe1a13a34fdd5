//! Automated discovery of self-organizing patterns in Lenia by population-based
//! intrinsically motivated goal exploration.

pub mod analysis;
pub mod cppn;
pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod explorer;
pub mod goal_space;
pub mod lenia;
pub mod nn;
pub mod pattern;
pub mod rng;

pub use error::{Error, Result};
pub use experiment::{run_experiment, Outcome};
pub use explorer::{explore, ExploreConfig, Exploration, RunRecord, SystemParams};
pub use goal_space::{GoalSpace, Variant};
pub use lenia::{DynamicsParams, Rollout, Simulator};
pub use pattern::Pattern;
