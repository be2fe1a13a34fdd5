//! Campaign configuration file.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use lenia_core::explorer::{ExploreConfig, ParamSpace};
use lenia_core::goal_space::{OnlineConfig, Variant};
use lenia_core::nn::{AugmentConfig, FitConfig, VaeConfig, BATCH_SIZE};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default)]
    pub campaign: CampaignSection,
    #[serde(default)]
    pub exploration: ExplorationSection,
    #[serde(default)]
    pub goal_space: GoalSpaceSection,
    #[serde(default)]
    pub evaluation: EvaluationSection,
    #[serde(default)]
    pub gallery: GallerySection,
    #[serde(rename = "experiment")]
    pub experiments: Vec<ExperimentSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignSection {
    pub output: PathBuf,
    pub parallel: usize,
}

impl Default for CampaignSection {
    fn default() -> Self {
        CampaignSection { output: PathBuf::from("campaign"), parallel: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExplorationSection {
    pub iterations: usize,
    pub init_iterations: usize,
    pub grid: usize,
    pub steps: usize,
    pub cppn_passes: usize,
}

impl Default for ExplorationSection {
    fn default() -> Self {
        ExplorationSection { iterations: 5000, init_iterations: 1000, grid: 256, steps: 200, cppn_passes: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GoalSpaceSection {
    pub latent: usize,
    pub beta: f32,
    pub channels: usize,
    pub hidden: usize,
    pub bound: f64,
    pub period: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub augment: bool,
    /// Directory of `.lpat` files for the pretrained goal space; generated
    /// when absent.
    pub dataset: Option<PathBuf>,
    pub dataset_count: usize,
    pub dataset_attempts: usize,
    pub pretrain_epochs: usize,
    pub pretrain_seed: u64,
}

impl Default for GoalSpaceSection {
    fn default() -> Self {
        GoalSpaceSection {
            latent: 8,
            beta: 5.0,
            channels: 32,
            hidden: 256,
            bound: 3.0,
            period: 100,
            epochs: 40,
            batch_size: BATCH_SIZE,
            augment: true,
            dataset: None,
            dataset_count: 558,
            dataset_attempts: 20_000,
            pretrain_epochs: 2000,
            pretrain_seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluationSection {
    pub bins: usize,
    pub sensitivity_bins: Vec<usize>,
    pub latent: usize,
    pub channels: usize,
    pub hidden: usize,
    pub beta: f32,
    pub epochs: usize,
    pub augment: bool,
    /// Include dead patterns in the pooled training set.
    pub pool_dead: bool,
    /// Upper bound on pooled patterns per model; 0 keeps all.
    pub max_pool: usize,
    pub seed: u64,
}

impl Default for EvaluationSection {
    fn default() -> Self {
        EvaluationSection {
            bins: 5,
            sensitivity_bins: vec![3, 5, 7],
            latent: 8,
            channels: 32,
            hidden: 256,
            beta: 5.0,
            epochs: 40,
            augment: true,
            pool_dead: true,
            max_pool: 0,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GallerySection {
    pub per_section: usize,
    pub seed: u64,
}

impl Default for GallerySection {
    fn default() -> Self {
        GallerySection { per_section: 16, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub variant: String,
    pub seeds: Vec<u64>,
}

/// One exploration of the campaign.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub variant: Variant,
    pub seed: u64,
}

impl RunSpec {
    pub fn name(&self) -> String {
        format!("{}-s{}", self.variant, self.seed)
    }
}

/// 1-based line of `key` inside `[section]` (or `[[section]]`), if present.
pub fn locate(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') {
            current = t.trim_matches(|c| c == '[' || c == ']').trim().to_string();
        } else if current == section && t.split('=').next().is_some_and(|k| k.trim() == key) {
            return Some(i + 1);
        }
    }
    None
}

impl CampaignConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: CampaignConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start].matches('\n').count() + 1);
            CliError::Config { line, message: e.message().trim().to_string() }
        })?;
        cfg.validate().map_err(|(section, key, message)| CliError::Config { line: locate(text, section, key), message })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config { line: None, message: format!("cannot read {}: {e}", path.display()) })?;
        Self::parse(&text).map_err(|e| e.in_file(path))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("campaign config serializes")
    }

    /// Checks invariants, reporting `(section, key, message)`.
    pub fn validate(&self) -> Result<(), (&'static str, &'static str, String)> {
        let e = &self.exploration;
        let g = &self.goal_space;
        if self.experiments.is_empty() {
            return Err(("experiment", "variant", "at least one [[experiment]] is required".into()));
        }
        let mut seen = HashSet::new();
        for x in &self.experiments {
            let v: Variant = x.variant.parse().map_err(|err: lenia_core::Error| ("experiment", "variant", err.to_string()))?;
            if x.seeds.is_empty() {
                return Err(("experiment", "seeds", format!("{v} lists no seeds")));
            }
            for &s in &x.seeds {
                if !seen.insert((v, s)) {
                    return Err(("experiment", "seeds", format!("seed {s} repeated for {v}")));
                }
            }
        }
        if self.campaign.parallel == 0 {
            return Err(("campaign", "parallel", "must be at least 1".into()));
        }
        let explore = self.explore_config(&RunSpec { variant: Variant::Ogl, seed: 0 });
        explore.validate().map_err(|err| {
            let key = if e.init_iterations > e.iterations {
                "init_iterations"
            } else if e.steps < 2 {
                "steps"
            } else {
                "grid"
            };
            ("exploration", key, err.to_string())
        })?;
        if g.latent == 0 || g.channels == 0 || g.hidden == 0 || !(g.beta >= 0.0) {
            return Err(("goal_space", "latent", "network sizes must be positive and beta non-negative".into()));
        }
        if g.period == 0 || g.batch_size == 0 {
            return Err(("goal_space", "period", "period and batch size must be positive".into()));
        }
        if !(g.bound > 0.0) {
            return Err(("goal_space", "bound", "must be positive".into()));
        }
        let ev = &self.evaluation;
        if ev.bins == 0 || ev.sensitivity_bins.contains(&0) {
            return Err(("evaluation", "bins", "bin counts must be positive".into()));
        }
        if ev.latent == 0 || ev.channels == 0 || ev.hidden == 0 {
            return Err(("evaluation", "latent", "network sizes must be positive".into()));
        }
        Ok(())
    }

    pub fn runs(&self) -> Vec<RunSpec> {
        self.experiments
            .iter()
            .flat_map(|x| {
                let v: Variant = x.variant.parse().expect("validated");
                x.seeds.iter().map(move |&seed| RunSpec { variant: v, seed })
            })
            .collect()
    }

    /// Replaces the seeds of each experiment by `base, base + 1, …`.
    pub fn override_seeds(&mut self, base: u64) {
        for x in &mut self.experiments {
            let n = x.seeds.len() as u64;
            x.seeds = (0..n).map(|k| base.wrapping_add(k)).collect();
        }
    }

    pub fn goal_vae(&self) -> VaeConfig {
        let g = &self.goal_space;
        VaeConfig { size: self.exploration.grid, latent: g.latent, channels: g.channels, hidden: g.hidden, beta: g.beta }
    }

    pub fn analytic_vae(&self) -> VaeConfig {
        let ev = &self.evaluation;
        VaeConfig { size: self.exploration.grid, latent: ev.latent, channels: ev.channels, hidden: ev.hidden, beta: ev.beta }
    }

    pub fn pretrain_fit(&self) -> FitConfig {
        let g = &self.goal_space;
        FitConfig { epochs: g.pretrain_epochs, batch_size: g.batch_size, augment: augment(g.augment) }
    }

    pub fn analytic_fit(&self) -> FitConfig {
        let ev = &self.evaluation;
        FitConfig { epochs: ev.epochs, batch_size: BATCH_SIZE, augment: augment(ev.augment) }
    }

    pub fn explore_config(&self, run: &RunSpec) -> ExploreConfig {
        let e = &self.exploration;
        let g = &self.goal_space;
        let mut cppn = lenia_core::cppn::MutationConfig::default();
        cppn.passes = e.cppn_passes;
        ExploreConfig {
            variant: run.variant,
            iterations: e.iterations,
            init_iterations: if run.variant == Variant::Random { 0 } else { e.init_iterations },
            seed: run.seed,
            size: e.grid,
            steps: e.steps,
            params: ParamSpace::for_grid(e.grid),
            cppn,
            vae: self.goal_vae(),
            goal_bound: g.bound,
            online: OnlineConfig { period: g.period, epochs: g.epochs, batch_size: g.batch_size, augment: augment(g.augment), ..OnlineConfig::default() },
            ..ExploreConfig::default()
        }
    }
}

fn augment(on: bool) -> AugmentConfig {
    if on {
        AugmentConfig::default()
    } else {
        AugmentConfig::none()
    }
}
