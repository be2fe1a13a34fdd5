use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};

use super::adam::Adam;
use super::augment::{augment, AugmentConfig};
use super::vae::Vae;
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::rng::Rng;

pub const BATCH_SIZE: usize = 64;

/// A model with its optimizer state.
#[derive(Clone, Debug)]
pub struct Trainer {
    pub vae: Vae,
    pub adam: Adam,
}

impl Trainer {
    pub fn new(vae: Vae) -> Self {
        let adam = Adam::new(vae.param_count());
        Trainer { vae, adam }
    }

    /// One Adam step on `batch` with sampled latents. Returns the loss before
    /// the step.
    pub fn train_batch(&mut self, batch: &[Pattern], rng: &mut Rng) -> Result<f64> {
        if batch.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let d = self.vae.config().latent;
        let noise: Vec<Vec<f32>> = (0..batch.len())
            .map(|_| (0..d).map(|_| StandardNormal.sample(rng)).collect())
            .collect();
        let xs: Vec<&[f32]> = batch.iter().map(|p| p.cells()).collect();
        if let Some(p) = batch.iter().find(|p| p.size() != self.vae.config().size) {
            return Err(Error::InvalidArgument(format!(
                "pattern of size {} given to a VAE for size {}",
                p.size(),
                self.vae.config().size
            )));
        }
        let (parts, grad) = self.vae.loss_and_gradient(&xs, Some(&noise))?;
        if !parts.loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteLoss(format!(
                "loss {} (reconstruction {}, KL {:?}) after {} optimizer steps",
                parts.loss,
                parts.a,
                parts.b,
                self.adam.steps()
            )));
        }
        self.adam.step(self.vae.params_mut(), &grad);
        Ok(parts.loss)
    }

    /// Trains on `data[order[..]]` in consecutive batches of `batch_size`,
    /// augmenting each drawn pattern. Returns the mean batch loss weighted by
    /// batch length.
    pub fn train_epoch(
        &mut self,
        data: &[Pattern],
        order: &[usize],
        batch_size: usize,
        aug: &AugmentConfig,
        rng: &mut Rng,
    ) -> Result<f64> {
        if order.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut total = 0.0;
        for idx in order.chunks(batch_size.max(1)) {
            let batch: Vec<Pattern> = idx.iter().map(|&i| augment(&data[i], aug, rng)).collect();
            total += self.train_batch(&batch, rng)? * idx.len() as f64;
        }
        Ok(total / order.len() as f64)
    }
}

/// Mean eval-mode loss per batch of `batch_size`, weighted by batch length.
pub fn validation_loss(vae: &Vae, data: &[Pattern], batch_size: usize) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut total = 0.0;
    for chunk in data.chunks(batch_size.max(1)) {
        total += vae.eval_loss(chunk)?.loss * chunk.len() as f64;
    }
    Ok(total / data.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub augment: AugmentConfig,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { epochs: 40, batch_size: BATCH_SIZE, augment: AugmentConfig::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub valid_loss: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct FitReport {
    /// The model with the lowest validation loss, or the final model when
    /// there is no validation data.
    pub best: Vae,
    pub best_epoch: usize,
    pub epochs: Vec<EpochStats>,
}

/// Trains for `cfg.epochs` epochs over uniformly shuffled `train` and keeps
/// the best checkpoint by loss on `valid`.
pub fn fit(trainer: &mut Trainer, train: &[Pattern], valid: &[Pattern], cfg: &FitConfig, rng: &mut Rng) -> Result<FitReport> {
    fit_with(trainer, train, valid, cfg, rng, |n, rng| {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        order
    })
}

/// As [`fit`] with a custom per-epoch draw of training indices.
pub fn fit_with(
    trainer: &mut Trainer,
    train: &[Pattern],
    valid: &[Pattern],
    cfg: &FitConfig,
    rng: &mut Rng,
    mut draw: impl FnMut(usize, &mut Rng) -> Vec<usize>,
) -> Result<FitReport> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut epochs = Vec::with_capacity(cfg.epochs);
    let mut best: Option<(f64, usize, Vae)> = None;
    for epoch in 0..cfg.epochs {
        let order = draw(train.len(), rng);
        let train_loss = trainer.train_epoch(train, &order, cfg.batch_size, &cfg.augment, rng)?;
        let valid_loss = if valid.is_empty() { None } else { Some(validation_loss(&trainer.vae, valid, cfg.batch_size)?) };
        if let Some(v) = valid_loss {
            if best.as_ref().is_none_or(|(b, _, _)| v < *b) {
                best = Some((v, epoch, trainer.vae.clone()));
            }
        }
        epochs.push(EpochStats { epoch, train_loss, valid_loss });
    }
    let (best_epoch, best) = match best {
        Some((_, e, m)) => (e, m),
        None => (cfg.epochs.saturating_sub(1), trainer.vae.clone()),
    };
    Ok(FitReport { best, best_epoch, epochs })
}
