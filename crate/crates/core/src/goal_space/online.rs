//! Periodic training of the online goal space.

use std::sync::Arc;

use rand::Rng as _;

use crate::analysis::PatternClass;
use crate::error::{Error, Result};
use crate::nn::{validation_loss, AugmentConfig, EpochStats, Trainer, Vae, BATCH_SIZE};
use crate::pattern::Pattern;
use crate::rng::{stream_rng, Rng, Stream};

/// Draws training indices giving half the probability mass to the patterns
/// added since the last training period.
///
/// The training set is ordered by insertion, so recent patterns form the
/// suffix starting at `first_recent`. Each of those is drawn with
/// probability `0.5 / N` and each older one with `0.5 / (|D| − N)`. Without
/// recent or without older patterns every pattern is equally likely.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ImportanceSampler {
    pub len: usize,
    pub first_recent: usize,
}

impl ImportanceSampler {
    pub fn recent(&self) -> usize {
        self.len - self.first_recent
    }

    pub fn draw(&self, rng: &mut Rng) -> usize {
        if self.first_recent == 0 || self.first_recent >= self.len {
            return rng.random_range(0..self.len);
        }
        if rng.random::<f64>() < 0.5 {
            rng.random_range(self.first_recent..self.len)
        } else {
            rng.random_range(0..self.first_recent)
        }
    }

    /// Probability of drawing index `i`.
    pub fn probability(&self, i: usize) -> f64 {
        if self.first_recent == 0 || self.first_recent >= self.len {
            1.0 / self.len as f64
        } else if i >= self.first_recent {
            0.5 / self.recent() as f64
        } else {
            0.5 / self.first_recent as f64
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OnlineConfig {
    /// Training period `K` in iterations.
    pub period: usize,
    /// Epochs `E` per period.
    pub epochs: usize,
    pub batch_size: usize,
    /// Every `holdout`-th collected pattern goes to the validation set.
    pub holdout: usize,
    pub augment: AugmentConfig,
}

impl Default for OnlineConfig {
    fn default() -> Self {
        OnlineConfig { period: 100, epochs: 40, batch_size: BATCH_SIZE, holdout: 10, augment: AugmentConfig::default() }
    }
}

impl OnlineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.period == 0 || self.batch_size == 0 || self.holdout == 0 {
            return Err(Error::InvalidParameter("period, batch size and holdout must be positive".into()));
        }
        Ok(())
    }
}

/// Summary of one training period.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodLog {
    pub period: usize,
    /// Exploration iteration after which the period ran.
    pub iteration: usize,
    pub train_size: usize,
    pub valid_size: usize,
    pub recent: usize,
    /// Empty when training was skipped for lack of data.
    pub epochs: Vec<EpochStats>,
}

impl PeriodLog {
    pub fn skipped(&self) -> bool {
        self.epochs.is_empty()
    }

    pub fn mean_train_loss(&self) -> Option<f64> {
        if self.epochs.is_empty() {
            None
        } else {
            Some(self.epochs.iter().map(|e| e.train_loss).sum::<f64>() / self.epochs.len() as f64)
        }
    }
}

/// Collects non-dead outcomes and trains the encoder every `K` iterations.
/// The optimizer state persists across periods.
#[derive(Clone, Debug)]
pub struct OnlineTrainer {
    config: OnlineConfig,
    seed: u64,
    trainer: Trainer,
    train: Vec<Arc<Pattern>>,
    valid: Vec<Arc<Pattern>>,
    collected: usize,
    first_recent: usize,
    periods: Vec<PeriodLog>,
}

impl OnlineTrainer {
    pub fn new(vae: Vae, config: OnlineConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        Ok(OnlineTrainer {
            config,
            seed,
            trainer: Trainer::new(vae),
            train: Vec::new(),
            valid: Vec::new(),
            collected: 0,
            first_recent: 0,
            periods: Vec::new(),
        })
    }

    pub fn vae(&self) -> &Vae {
        &self.trainer.vae
    }

    pub fn config(&self) -> &OnlineConfig {
        &self.config
    }

    pub fn periods(&self) -> &[PeriodLog] {
        &self.periods
    }

    pub fn train_size(&self) -> usize {
        self.train.len()
    }

    pub fn valid_size(&self) -> usize {
        self.valid.len()
    }

    pub fn sampler(&self) -> ImportanceSampler {
        ImportanceSampler { len: self.train.len(), first_recent: self.first_recent }
    }

    /// Adds an outcome to the training data unless it is dead.
    pub fn observe(&mut self, last: Arc<Pattern>, class: PatternClass) {
        if class == PatternClass::Dead {
            return;
        }
        self.collected += 1;
        if self.collected % self.config.holdout == 0 {
            self.valid.push(last);
        } else {
            self.train.push(last);
        }
    }

    pub fn due(&self, iteration: usize) -> bool {
        iteration > 0 && iteration % self.config.period == 0
    }

    /// Runs one training period if `iteration` is a multiple of `K`.
    /// Returns the log of the period, which has no epochs when fewer than
    /// one batch of training patterns exists.
    pub fn maybe_train(&mut self, iteration: usize) -> Result<Option<&PeriodLog>> {
        if !self.due(iteration) {
            return Ok(None);
        }
        let period = self.periods.len() + 1;
        let sampler = self.sampler();
        let mut log = PeriodLog {
            period,
            iteration,
            train_size: self.train.len(),
            valid_size: self.valid.len(),
            recent: sampler.recent(),
            epochs: Vec::new(),
        };
        if self.train.len() >= self.config.batch_size {
            let mut rng = stream_rng(self.seed, Stream::Training, period as u64);
            let data: Vec<Pattern> = self.train.iter().map(|p| (**p).clone()).collect();
            let valid: Vec<Pattern> = self.valid.iter().map(|p| (**p).clone()).collect();
            for epoch in 0..self.config.epochs {
                let order: Vec<usize> = (0..data.len()).map(|_| sampler.draw(&mut rng)).collect();
                let train_loss =
                    self.trainer.train_epoch(&data, &order, self.config.batch_size, &self.config.augment, &mut rng)?;
                let valid_loss = if valid.is_empty() {
                    None
                } else {
                    Some(validation_loss(&self.trainer.vae, &valid, self.config.batch_size)?)
                };
                log.epochs.push(EpochStats { epoch, train_loss, valid_loss });
            }
            self.first_recent = self.train.len();
        }
        self.periods.push(log);
        Ok(self.periods.last())
    }
}
