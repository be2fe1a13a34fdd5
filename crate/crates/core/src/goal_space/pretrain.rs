//! Dataset and pretraining for the pretrained goal space.

use std::path::Path;

use rand::seq::SliceRandom;

use crate::analysis::PatternClass;
use crate::cppn::{render_pattern, sample_genome, MutationConfig};
use crate::error::{Error, Result};
use crate::experiment::run_experiment;
use crate::explorer::{sample_random_params, ParamSpace};
use crate::nn::{fit, FitConfig, FitReport, Trainer, Vae};
use crate::pattern::Pattern;
use crate::rng::{stream_rng, Rng, Stream};

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetConfig {
    pub count: usize,
    pub size: usize,
    pub steps: usize,
    /// Rollouts tried in search of animals before falling back to other
    /// living patterns.
    pub max_attempts: usize,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig { count: 558, size: 256, steps: 200, max_attempts: 20_000 }
    }
}

/// Generated dataset: rollout finals classified as animals and CPPN renders
/// in equal parts.
#[derive(Clone, Debug)]
pub struct GeneratedDataset {
    pub patterns: Vec<Pattern>,
    pub animals: usize,
    /// Living non-animal finals used because the attempt budget ran out.
    pub substitutes: usize,
    pub attempts: usize,
}

/// Builds a dataset of `count` patterns: `count / 2` animal finals found by
/// rejection sampling of random parameters, the rest rendered CPPN initial
/// states. Finals come first, then renders.
pub fn generate_dataset(
    cfg: &DatasetConfig,
    space: &ParamSpace,
    cppn: &MutationConfig,
    seed: u64,
) -> Result<GeneratedDataset> {
    if cfg.count == 0 {
        return Err(Error::EmptyDataset);
    }
    space.validate(cfg.size)?;
    let wanted = cfg.count / 2;
    let mut animals = Vec::new();
    let mut fallback = Vec::new();
    let mut attempts = 0;
    while animals.len() < wanted && attempts < cfg.max_attempts {
        let mut rng = stream_rng(seed, Stream::Dataset, attempts as u64);
        attempts += 1;
        let theta = sample_random_params(space, cppn, &mut rng);
        let out = run_experiment(&theta, cfg.size, cfg.steps, cppn.passes)?;
        match out.class {
            PatternClass::Animal => animals.push((*out.last).clone()),
            PatternClass::NonAnimal if fallback.len() < wanted => fallback.push((*out.last).clone()),
            _ => {}
        }
    }
    let found = animals.len();
    let substitutes = (wanted - found).min(fallback.len());
    animals.extend(fallback.into_iter().take(substitutes));
    let renders = cfg.count - animals.len();
    let mut patterns = animals;
    for i in 0..renders {
        let mut rng = stream_rng(seed, Stream::Dataset, (cfg.max_attempts + i) as u64);
        patterns.push(render_pattern(&sample_genome(cppn, &mut rng), cfg.size, cppn.passes));
    }
    Ok(GeneratedDataset { patterns, animals: found, substitutes, attempts })
}

/// Loads every `.lpat` file of `dir` in file-name order.
pub fn load_dataset_dir(dir: &Path) -> Result<Vec<Pattern>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "lpat"))
        .collect();
    paths.sort();
    let patterns = paths.iter().map(Pattern::load_lpat).collect::<Result<Vec<_>>>()?;
    if patterns.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(patterns)
}

#[derive(Clone, Debug)]
pub struct DatasetSplit {
    pub train: Vec<Pattern>,
    pub valid: Vec<Pattern>,
    pub test: Vec<Pattern>,
}

/// Shuffles and splits 75 / 10 / 15.
pub fn split_dataset(mut patterns: Vec<Pattern>, rng: &mut Rng) -> Result<DatasetSplit> {
    if patterns.is_empty() {
        return Err(Error::EmptyDataset);
    }
    patterns.shuffle(rng);
    let n = patterns.len();
    let n_train = (n * 75).div_ceil(100);
    let n_valid = (n * 10 / 100).min(n - n_train);
    let test = patterns.split_off(n_train + n_valid);
    let valid = patterns.split_off(n_train);
    Ok(DatasetSplit { train: patterns, valid, test })
}

/// Trains `vae` on the split and returns the checkpoint with the lowest
/// validation loss.
pub fn pretrain(vae: Vae, split: &DatasetSplit, cfg: &FitConfig, rng: &mut Rng) -> Result<FitReport> {
    if split.train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut trainer = Trainer::new(vae);
    fit(&mut trainer, &split.train, &split.valid, cfg, rng)
}
