//! A convolutional β-VAE with hand-written gradients, Adam and data
//! augmentation.

mod adam;
mod augment;
mod check;
mod layers;
mod train;
mod vae;

pub use adam::Adam;
pub use check::{gradient_check, relative_error, GradientCheck, Sampling};
pub use augment::{augment, rotate_torus, AugmentConfig, Augmentation};
pub use train::{fit, fit_with, validation_loss, EpochStats, FitConfig, FitReport, Trainer, BATCH_SIZE};
pub use layers::Real;
pub use vae::{
    bce_with_logits, reparameterize, sigmoid, softplus, vae_loss, Encoding, Init, LossParts, Network, Vae, VaeConfig, DEPTH,
};
