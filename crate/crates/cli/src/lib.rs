//! Campaign orchestration: configuration, run stores, evaluation and
//! gallery export.

pub mod config;
pub mod error;
pub mod evaluate;
pub mod gallery;
pub mod run;
pub mod store;

pub use config::{CampaignConfig, RunSpec};
pub use error::CliError;
pub use evaluate::{cmd_evaluate, EvaluationReport, SpaceKind};
pub use gallery::{cmd_gallery, cmd_inspect};
pub use run::{cmd_run, RunSummary};
