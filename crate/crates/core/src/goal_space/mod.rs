//! Goal spaces: how outcomes are encoded and how goals are drawn.

mod online;
mod pretrain;

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;

use crate::analysis::StatFeatures;
use crate::error::{Error, Result};
use crate::nn::{Init, Vae, VaeConfig};
use crate::pattern::Pattern;
use crate::rng::Rng;

pub use online::{ImportanceSampler, OnlineConfig, OnlineTrainer, PeriodLog};
pub use pretrain::{
    generate_dataset, load_dataset_dir, pretrain, split_dataset, DatasetConfig, DatasetSplit, GeneratedDataset,
};

/// Exploration algorithm: pure random sampling or an IMGEP with one of the
/// goal spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Random,
    Hgs,
    Rgs,
    Pgl,
    Ogl,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::Random, Variant::Hgs, Variant::Rgs, Variant::Pgl, Variant::Ogl];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Random => "random",
            Variant::Hgs => "hgs",
            Variant::Rgs => "rgs",
            Variant::Pgl => "pgl",
            Variant::Ogl => "ogl",
        }
    }

    pub fn uses_goals(self) -> bool {
        self != Variant::Random
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown variant `{s}` (expected random, hgs, rgs, pgl or ogl)")))
    }
}

/// Sampling box of the hand-defined goal space, in feature order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HgsRanges {
    pub mass: (f64, f64),
    pub volume: (f64, f64),
    pub density: (f64, f64),
    pub asymmetry: (f64, f64),
    pub centeredness: (f64, f64),
}

impl Default for HgsRanges {
    fn default() -> Self {
        HgsRanges {
            mass: (0.0, 1.0),
            volume: (0.0, 1.0),
            density: (0.0, 1.0),
            asymmetry: (-1.0, 1.0),
            centeredness: (0.0, 1.0),
        }
    }
}

impl HgsRanges {
    pub fn as_array(&self) -> [(f64, f64); 5] {
        [self.mass, self.volume, self.density, self.asymmetry, self.centeredness]
    }

    pub fn validate(&self) -> Result<()> {
        if self.as_array().iter().all(|(a, b)| a < b) {
            Ok(())
        } else {
            Err(Error::InvalidParameter("every goal range needs min < max".into()))
        }
    }
}

/// Default half-width of the latent goal box of learned goal spaces.
pub const LATENT_BOUND: f64 = 3.0;

#[derive(Clone, Debug)]
enum Encoder {
    Features(HgsRanges),
    Random(Box<Vae>),
    Learned { vae: Box<Vae>, bound: f64 },
}

/// Encoder of outcomes together with the goal sampler over the same space.
#[derive(Clone, Debug)]
pub struct GoalSpace {
    variant: Variant,
    encoder: Encoder,
}

impl GoalSpace {
    pub fn hand_defined(ranges: HgsRanges) -> Result<Self> {
        ranges.validate()?;
        Ok(GoalSpace { variant: Variant::Hgs, encoder: Encoder::Features(ranges) })
    }

    /// An untrained encoder with Xavier weights.
    pub fn random(config: VaeConfig, rng: &mut Rng) -> Result<Self> {
        let vae = Vae::new(config, Init::Xavier, rng)?;
        Ok(GoalSpace { variant: Variant::Rgs, encoder: Encoder::Random(Box::new(vae)) })
    }

    /// A learned encoder with goals drawn from `[−bound, bound]^d`.
    /// `variant` is [`Variant::Pgl`] or [`Variant::Ogl`].
    pub fn learned(variant: Variant, vae: Vae, bound: f64) -> Result<Self> {
        if !matches!(variant, Variant::Pgl | Variant::Ogl) {
            return Err(Error::InvalidArgument(format!("{variant} is not a learned goal space")));
        }
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::InvalidParameter(format!("goal bound must be positive, got {bound}")));
        }
        Ok(GoalSpace { variant, encoder: Encoder::Learned { vae: Box::new(vae), bound } })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn dim(&self) -> usize {
        match &self.encoder {
            Encoder::Features(_) => 5,
            Encoder::Random(vae) | Encoder::Learned { vae, .. } => vae.config().latent,
        }
    }

    pub fn vae(&self) -> Option<&Vae> {
        match &self.encoder {
            Encoder::Features(_) => None,
            Encoder::Random(vae) | Encoder::Learned { vae, .. } => Some(vae),
        }
    }

    /// Replaces the model of a learned goal space.
    pub fn set_vae(&mut self, new: Vae) -> Result<()> {
        match &mut self.encoder {
            Encoder::Learned { vae, .. } if vae.config() == new.config() => {
                **vae = new;
                Ok(())
            }
            Encoder::Learned { .. } => Err(Error::InvalidArgument("replacement model has another shape".into())),
            _ => Err(Error::InvalidArgument(format!("{} has no trainable encoder", self.variant))),
        }
    }

    /// `ĝ = R(o)`: the features for the hand-defined space, the latent mean
    /// otherwise.
    pub fn encode(&self, last: &Pattern, features: &StatFeatures) -> Result<Vec<f64>> {
        match &self.encoder {
            Encoder::Features(_) => Ok(features.to_vec()),
            Encoder::Random(vae) | Encoder::Learned { vae, .. } => {
                Ok(vae.encode_one(last)?.mu.iter().map(|&v| v as f64).collect())
            }
        }
    }

    /// Encodes many outcomes, in parallel for network encoders.
    pub fn encode_all(&self, outcomes: &[(&Pattern, &StatFeatures)]) -> Result<Vec<Vec<f64>>> {
        match &self.encoder {
            Encoder::Features(_) => Ok(outcomes.iter().map(|(_, f)| f.to_vec()).collect()),
            Encoder::Random(vae) | Encoder::Learned { vae, .. } => {
                let pats: Vec<Pattern> = outcomes.iter().map(|(p, _)| (*p).clone()).collect();
                Ok(vae.encode(&pats)?.into_iter().map(|e| e.mu.iter().map(|&v| v as f64).collect()).collect())
            }
        }
    }

    /// Per-dimension sampling box. The random goal space uses the envelope
    /// of the reached goals so far.
    pub fn bounds<'a>(&self, reached: impl IntoIterator<Item = &'a [f64]>) -> Result<Vec<(f64, f64)>> {
        match &self.encoder {
            Encoder::Features(r) => Ok(r.as_array().to_vec()),
            Encoder::Learned { bound, .. } => Ok(vec![(-bound, *bound); self.dim()]),
            Encoder::Random(_) => {
                let mut env: Option<Vec<(f64, f64)>> = None;
                for g in reached {
                    if g.len() != self.dim() {
                        return Err(Error::InvalidArgument(format!(
                            "reached goal of dimension {} in a {}-dimensional space",
                            g.len(),
                            self.dim()
                        )));
                    }
                    let env = env.get_or_insert_with(|| g.iter().map(|&v| (v, v)).collect());
                    for ((lo, hi), &v) in env.iter_mut().zip(g) {
                        *lo = lo.min(v);
                        *hi = hi.max(v);
                    }
                }
                env.ok_or(Error::EmptyHistory)
            }
        }
    }

    /// Draws a goal uniformly from [`GoalSpace::bounds`].
    pub fn sample<'a>(&self, reached: impl IntoIterator<Item = &'a [f64]>, rng: &mut Rng) -> Result<Vec<f64>> {
        Ok(sample_box(&self.bounds(reached)?, rng))
    }
}

/// Uniform draw per dimension; a degenerate interval yields its endpoint.
pub fn sample_box(bounds: &[(f64, f64)], rng: &mut Rng) -> Vec<f64> {
    bounds.iter().map(|&(lo, hi)| if lo < hi { rng.random_range(lo..hi) } else { lo }).collect()
}
