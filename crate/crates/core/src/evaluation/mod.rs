//! Scoring of finished explorations: analytic spaces, binned diversity,
//! class proportions and significance tests.

mod stats;

use std::collections::HashSet;

use rand::seq::SliceRandom;

use crate::analysis::PatternClass;
use crate::cppn::render_pattern;
use crate::error::{Error, Result};
use crate::explorer::RunRecord;
use crate::nn::{fit, FitConfig, FitReport, Init, Trainer, Vae, VaeConfig};
use crate::pattern::Pattern;
use crate::rng::Rng;

pub use stats::{ln_gamma, regularized_beta, welch_t, Welch};

/// Range of the latent coordinates in the analytic spaces.
pub const LATENT_RANGE: (f64, f64) = (-5.0, 5.0);

/// A space with a fixed box per dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticSpace {
    pub names: Vec<String>,
    pub ranges: Vec<(f64, f64)>,
}

impl AnalyticSpace {
    pub fn new(names: Vec<String>, ranges: Vec<(f64, f64)>) -> Result<Self> {
        if names.len() != ranges.len() || ranges.is_empty() {
            return Err(Error::InvalidArgument("one name per range, at least one dimension".into()));
        }
        if ranges.iter().any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidArgument("every range needs min < max".into()));
        }
        Ok(AnalyticSpace { names, ranges })
    }

    /// The five statistical features followed by `latent` coordinates of a
    /// model of final patterns.
    pub fn behavior(latent: usize) -> Self {
        let mut names: Vec<String> =
            ["mass", "volume", "density", "asymmetry", "centeredness"].iter().map(|s| s.to_string()).collect();
        let mut ranges = vec![(0.0, 1.0), (0.0, 1.0), (0.0, 1.0), (-1.0, 1.0), (0.0, 1.0)];
        names.extend((1..=latent).map(|i| format!("final_z{i}")));
        ranges.extend(std::iter::repeat_n(LATENT_RANGE, latent));
        AnalyticSpace { names, ranges }
    }

    /// The seven dynamics parameters followed by `latent` coordinates of a
    /// model of initial states.
    pub fn parameter(latent: usize) -> Self {
        let mut names: Vec<String> =
            ["R", "T", "mu", "sigma", "beta1", "beta2", "beta3"].iter().map(|s| s.to_string()).collect();
        let mut ranges = vec![(1.0, 20.0), (2.0, 10.0), (0.0, 1.0), (0.0, 0.3), (0.0, 1.0), (0.0, 1.0), (0.0, 1.0)];
        names.extend((1..=latent).map(|i| format!("initial_z{i}")));
        ranges.extend(std::iter::repeat_n(LATENT_RANGE, latent));
        AnalyticSpace { names, ranges }
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    /// Per-dimension bin of `point`: 0 below the range, `bins_inside + 1`
    /// above it, otherwise `1 + j` for the half-open inside bin `j`, with
    /// the maximum in the last inside bin.
    pub fn cell(&self, point: &[f64], bins_inside: usize) -> Result<Vec<u16>> {
        if point.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "point of dimension {} in a {}-dimensional space",
                point.len(),
                self.dim()
            )));
        }
        if bins_inside == 0 || bins_inside >= u16::MAX as usize {
            return Err(Error::InvalidArgument(format!("unsupported bin count {bins_inside}")));
        }
        point
            .iter()
            .zip(&self.ranges)
            .map(|(&v, &(a, b))| {
                if v.is_nan() {
                    Err(Error::InvalidArgument("NaN coordinate".into()))
                } else if v < a {
                    Ok(0)
                } else if v > b {
                    Ok(bins_inside as u16 + 1)
                } else {
                    let j = ((v - a) / (b - a) * bins_inside as f64).floor() as usize;
                    Ok(j.min(bins_inside - 1) as u16 + 1)
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiversityConfig {
    /// Bins per dimension inside the range; two more catch out-of-range
    /// values.
    pub bins_inside: usize,
}

impl Default for DiversityConfig {
    fn default() -> Self {
        DiversityConfig { bins_inside: 5 }
    }
}

/// Number of occupied cells.
pub fn diversity(points: &[Vec<f64>], space: &AnalyticSpace, cfg: DiversityConfig) -> Result<usize> {
    let cells = points.iter().map(|p| space.cell(p, cfg.bins_inside)).collect::<Result<HashSet<_>>>()?;
    Ok(cells.len())
}

/// Cumulative diversity after each point, counting only points whose class
/// passes `filter`.
pub fn diversity_curve(
    points: &[Vec<f64>],
    classes: &[PatternClass],
    space: &AnalyticSpace,
    cfg: DiversityConfig,
    filter: Option<PatternClass>,
) -> Result<Vec<usize>> {
    if points.len() != classes.len() {
        return Err(Error::InvalidArgument("one class per point".into()));
    }
    let mut seen = HashSet::new();
    let mut curve = Vec::with_capacity(points.len());
    for (p, &c) in points.iter().zip(classes) {
        let cell = space.cell(p, cfg.bins_inside)?;
        if filter.is_none_or(|f| f == c) {
            seen.insert(cell);
        }
        curve.push(seen.len());
    }
    Ok(curve)
}

/// Shares of dead, animal and non-animal outcomes.
pub fn class_proportions(classes: &[PatternClass]) -> [f64; 3] {
    if classes.is_empty() {
        return [0.0; 3];
    }
    let n = classes.len() as f64;
    PatternClass::ALL.map(|k| classes.iter().filter(|&&c| c == k).count() as f64 / n)
}

/// Diversity of each point set for each inside-bin count.
pub fn bin_sensitivity(sets: &[&[Vec<f64>]], space: &AnalyticSpace, bins: &[usize]) -> Result<Vec<Vec<usize>>> {
    bins.iter()
        .map(|&b| sets.iter().map(|s| diversity(s, space, DiversityConfig { bins_inside: b })).collect())
        .collect()
}

/// Positions sorted by decreasing score, ties in index order.
pub fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx
}

/// Splits `patterns` at the 7.5 : 1 train to validation ratio after
/// shuffling.
pub fn analytic_split(mut patterns: Vec<Pattern>, rng: &mut Rng) -> Result<(Vec<Pattern>, Vec<Pattern>)> {
    if patterns.is_empty() {
        return Err(Error::EmptyDataset);
    }
    patterns.shuffle(rng);
    let n_valid = ((patterns.len() as f64) / 8.5).round() as usize;
    let valid = patterns.split_off(patterns.len() - n_valid);
    Ok((patterns, valid))
}

/// Trains one analytic model on a pooled set and keeps the best validation
/// checkpoint.
pub fn train_analytic_vae(patterns: Vec<Pattern>, config: VaeConfig, fit_cfg: &FitConfig, rng: &mut Rng) -> Result<FitReport> {
    let (train, valid) = analytic_split(patterns, rng)?;
    let vae = Vae::new(config, Init::FanIn, rng)?;
    fit(&mut Trainer::new(vae), &train, &valid, fit_cfg, rng)
}

fn latents(vae: &Vae, patterns: &[Pattern]) -> Result<Vec<Vec<f64>>> {
    Ok(vae.encode(patterns)?.into_iter().map(|e| e.mu.iter().map(|&v| v as f64).collect()).collect())
}

/// Behavior-space points: statistical features then the final-pattern
/// latents.
pub fn behavior_points(records: &[RunRecord], vae: &Vae) -> Result<Vec<Vec<f64>>> {
    let finals: Vec<Pattern> = records.iter().map(|r| (*r.outcome.last).clone()).collect();
    let z = latents(vae, &finals)?;
    Ok(records
        .iter()
        .zip(z)
        .map(|(r, z)| {
            let mut p = r.outcome.features.to_vec();
            p.extend(z);
            p
        })
        .collect())
}

/// Initial states of `records`, regenerated from their genomes.
pub fn initial_states(records: &[RunRecord], size: usize, passes: usize) -> Vec<Pattern> {
    records.iter().map(|r| render_pattern(&r.params.genome, size, passes)).collect()
}

/// Parameter-space points: dynamics parameters then the initial-state
/// latents.
pub fn parameter_points(records: &[RunRecord], vae: &Vae, passes: usize) -> Result<Vec<Vec<f64>>> {
    let z = latents(vae, &initial_states(records, vae.config().size, passes))?;
    Ok(records
        .iter()
        .zip(z)
        .map(|(r, z)| {
            let d = &r.params.dynamics;
            let mut p = vec![d.radius as f64, d.time_scale as f64, d.mu, d.sigma, d.beta[0], d.beta[1], d.beta[2]];
            p.extend(z);
            p
        })
        .collect())
}
