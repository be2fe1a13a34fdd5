//! Central finite-difference check of the analytic gradient.

use rand::Rng as _;

use super::layers::Real;
use super::vae::Network;
use crate::error::Result;
use crate::rng::Rng;

#[derive(Clone, Debug, PartialEq)]
pub struct GradientCheck {
    pub coords: usize,
    /// Coordinates whose relative error is within the tolerance.
    pub passed: usize,
    pub worst: f64,
    /// Coordinates where some ReLU unit switches state between `θ − h` and
    /// `θ + h`, so the loss is not differentiable on the probed interval.
    pub straddling: usize,
    /// Coordinates that pass among those not straddling a kink.
    pub smooth_passed: usize,
    /// Parameter groups (weights or biases of one layer) that were probed.
    pub groups: usize,
}

impl GradientCheck {
    pub fn pass_rate(&self) -> f64 {
        self.passed as f64 / self.coords as f64
    }

    /// Pass rate over coordinates whose probe interval contains no kink.
    pub fn smooth_pass_rate(&self) -> f64 {
        let smooth = self.coords - self.straddling;
        if smooth == 0 {
            1.0
        } else {
            self.smooth_passed as f64 / smooth as f64
        }
    }
}

/// `|a − n| / max(|a|, |n|)`, zero when both vanish.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let den = analytic.abs().max(numeric.abs());
    if den == 0.0 {
        0.0
    } else {
        (analytic - numeric).abs() / den
    }
}

/// How probed coordinates are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// Uniformly over all parameters.
    Uniform,
    /// Round-robin over parameter groups, uniformly within a group.
    PerGroup,
}

/// Compares the analytic gradient of the batch loss with central
/// differences of step `h` on `coords` coordinates.
#[allow(clippy::too_many_arguments)]
pub fn gradient_check<T: Real>(
    net: &Network<T>,
    batch: &[Vec<T>],
    noise: &[Vec<T>],
    coords: usize,
    h: f64,
    tol: f64,
    sampling: Sampling,
    rng: &mut Rng,
) -> Result<GradientCheck> {
    let xs: Vec<&[T]> = batch.iter().map(|v| v.as_slice()).collect();
    let (_, grad) = net.loss_and_gradient(&xs, Some(noise))?;
    let groups = net.param_groups();
    let mut probe = net.clone();
    let mut passed = 0;
    let mut worst = 0.0f64;
    let (mut straddling, mut smooth_passed) = (0, 0);
    let mut seen = vec![false; groups.len()];
    for k in 0..coords {
        let i = match sampling {
            Sampling::Uniform => rng.random_range(0..net.param_count()),
            Sampling::PerGroup => {
                let (lo, hi) = groups[k % groups.len()];
                rng.random_range(lo..hi)
            }
        };
        seen[groups.iter().position(|&(lo, hi)| (lo..hi).contains(&i)).unwrap()] = true;
        let orig = probe.params()[i];
        probe.params_mut()[i] = orig + T::of(h);
        let up = probe.loss_and_gradient(&xs, Some(noise))?.0.loss;
        let sig_up = probe.relu_signature(&xs, Some(noise));
        probe.params_mut()[i] = orig - T::of(h);
        let down = probe.loss_and_gradient(&xs, Some(noise))?.0.loss;
        let kink = sig_up != probe.relu_signature(&xs, Some(noise));
        probe.params_mut()[i] = orig;
        let numeric = (up - down) / (2.0 * h);
        let err = relative_error(grad[i].to64(), numeric);
        worst = worst.max(err);
        if err <= tol {
            passed += 1;
        }
        if kink {
            straddling += 1;
        } else if err <= tol {
            smooth_passed += 1;
        }
    }
    Ok(GradientCheck { coords, passed, worst, straddling, smooth_passed, groups: seen.iter().filter(|&&s| s).count() })
}
