//! `run`: execute every exploration of a campaign.

use std::fs;
use std::path::{Path, PathBuf};

use lenia_core::explorer::{explore, Event};
use lenia_core::goal_space::{generate_dataset, load_dataset_dir, pretrain, split_dataset, DatasetConfig, Variant};
use lenia_core::nn::{Init, Vae};
use lenia_core::rng::{stream_rng, Stream};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{CampaignConfig, ExplorationSection, GoalSpaceSection, RunSpec};
use crate::error::CliError;
use crate::store;

pub const CAMPAIGN_CONFIG: &str = "campaign.toml";

/// Settings that determine the content of one run directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub variant: String,
    pub seed: u64,
    pub exploration: ExplorationSection,
    pub goal_space: GoalSpaceSection,
}

impl RunMeta {
    pub fn new(cfg: &CampaignConfig, run: &RunSpec) -> Self {
        RunMeta {
            variant: run.variant.to_string(),
            seed: run.seed,
            exploration: cfg.exploration.clone(),
            goal_space: cfg.goal_space.clone(),
        }
    }
}

pub fn run_dir(out: &Path, run: &RunSpec) -> PathBuf {
    out.join("runs").join(run.name())
}

/// A run whose manifest is complete and whose settings match `cfg`.
pub fn is_complete(cfg: &CampaignConfig, out: &Path, run: &RunSpec) -> bool {
    let dir = run_dir(out, run);
    let meta = toml::to_string(&RunMeta::new(cfg, run)).unwrap();
    fs::read_to_string(dir.join(store::RUN_CONFIG)).is_ok_and(|t| t == meta)
        && store::manifest_len(&dir) == Some(cfg.exploration.iterations)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunSummary {
    pub completed: Vec<String>,
    pub skipped: Vec<String>,
    pub failed: Vec<(String, String)>,
}

/// Runs every exploration not already complete, `parallel` at a time.
pub fn cmd_run(cfg: &CampaignConfig, out: &Path, parallel: usize) -> Result<RunSummary, CliError> {
    fs::create_dir_all(out)?;
    store::write_atomic(&out.join(CAMPAIGN_CONFIG), cfg.to_toml().as_bytes())?;
    let runs = cfg.runs();
    let pgl = if runs.iter().any(|r| r.variant == Variant::Pgl && !is_complete(cfg, out, r)) {
        Some(pretrained_model(cfg, out)?)
    } else {
        None
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel.max(1))
        .build()
        .map_err(|e| CliError::Config { line: None, message: format!("cannot start {parallel} workers: {e}") })?;
    let results: Vec<(String, Result<bool, CliError>)> = pool.install(|| {
        runs.par_iter().map(|r| (r.name(), execute(cfg, out, r, pgl.as_ref()))).collect()
    });
    let mut summary = RunSummary::default();
    for (name, res) in results {
        match res {
            Ok(true) => summary.completed.push(name),
            Ok(false) => summary.skipped.push(name),
            Err(e) => {
                eprintln!("{name}: failed: {e}");
                summary.failed.push((name, e.to_string()));
            }
        }
    }
    Ok(summary)
}

/// Loads or trains the model of the pretrained goal space, stored as
/// `<out>/pgl/model.lvae`.
pub fn pretrained_model(cfg: &CampaignConfig, out: &Path) -> Result<Vae, CliError> {
    let dir = out.join("pgl");
    let path = dir.join(store::MODEL);
    let vae_cfg = cfg.goal_vae();
    if path.exists() {
        let vae = Vae::load(&path)?;
        if *vae.config() == vae_cfg {
            return Ok(vae);
        }
    }
    fs::create_dir_all(&dir)?;
    let g = &cfg.goal_space;
    let e = &cfg.exploration;
    let patterns = match &g.dataset {
        Some(d) => load_dataset_dir(d)?,
        None => {
            let dcfg = DatasetConfig { count: g.dataset_count, size: e.grid, steps: e.steps, max_attempts: g.dataset_attempts };
            let explore = cfg.explore_config(&RunSpec { variant: Variant::Pgl, seed: g.pretrain_seed });
            eprintln!("pgl: generating {} dataset patterns", g.dataset_count);
            let d = generate_dataset(&dcfg, &explore.params, &explore.cppn, g.pretrain_seed)?;
            eprintln!("pgl: {} animals, {} substitutes after {} rollouts", d.animals, d.substitutes, d.attempts);
            d.patterns
        }
    };
    let mut rng = stream_rng(g.pretrain_seed, Stream::Dataset, u64::MAX);
    let split = split_dataset(patterns, &mut rng)?;
    let vae = Vae::new(vae_cfg, Init::FanIn, &mut stream_rng(g.pretrain_seed, Stream::GoalSpace, 0))?;
    eprintln!("pgl: training on {} patterns for {} epochs", split.train.len(), g.pretrain_epochs);
    let report = pretrain(vae, &split, &cfg.pretrain_fit(), &mut stream_rng(g.pretrain_seed, Stream::Training, 0))?;
    report.best.save(&path)?;
    Ok(report.best)
}

fn execute(cfg: &CampaignConfig, out: &Path, run: &RunSpec, pgl: Option<&Vae>) -> Result<bool, CliError> {
    if is_complete(cfg, out, run) {
        eprintln!("{}: complete, skipped", run.name());
        return Ok(false);
    }
    let dir = run_dir(out, run);
    if dir.exists() {
        fs::remove_dir_all(&dir)?;
    }
    store::prepare(&dir)?;
    fs::write(dir.join(store::RUN_CONFIG), toml::to_string(&RunMeta::new(cfg, run)).unwrap())?;
    let explore_cfg = cfg.explore_config(run);
    let n = explore_cfg.iterations;
    let step = (n / 10).max(1);
    let mut io_error: Option<CliError> = None;
    let ex = explore(&explore_cfg, pgl.cloned(), |event| {
        let res = match event {
            Event::Iteration(r) => {
                if r.index % step == 0 || r.index == n {
                    eprintln!("{}: {}/{}", run.name(), r.index, n);
                }
                store::write_record_files(&dir, r)
            }
            Event::Trained { log, vae } => {
                if let Some(l) = log.mean_train_loss() {
                    eprintln!("{}: period {} trained on {} patterns, mean loss {l:.2}", run.name(), log.period, log.train_size);
                }
                vae.save(&store::checkpoint_path(&dir, log.period)).map_err(CliError::from)
            }
        };
        if let Err(e) = res {
            io_error.get_or_insert(e);
        }
    })?;
    if let Some(e) = io_error {
        return Err(e);
    }
    if !ex.periods.is_empty() {
        store::write_atomic(&dir.join(store::LOSS), &store::loss_bytes(&ex.periods)?)?;
    }
    if let Some(vae) = ex.goal_space.as_ref().and_then(|g| g.vae()) {
        vae.save(&dir.join(store::MODEL))?;
    }
    store::write_manifest(&dir, &ex.history)?;
    Ok(true)
}
