use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::cppn::{mutate_genome, render_pattern, sample_genome, CppnGenome, MutationConfig};
use crate::error::{Error, Result};
use crate::lenia::DynamicsParams;
use crate::pattern::Pattern;
use crate::rng::Rng;

/// Parameters `θ` of one experiment: the CPPN that draws `A^{t=1}` and the
/// dynamics.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemParams {
    pub genome: CppnGenome,
    pub dynamics: DynamicsParams,
}

impl SystemParams {
    pub fn initial_state(&self, size: usize, passes: usize) -> Pattern {
        render_pattern(&self.genome, size, passes)
    }
}

/// Sampling ranges and mutation strengths of the dynamics parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSpace {
    pub radius: (u32, u32),
    pub time_scale: (u32, u32),
    pub mu: (f64, f64),
    pub sigma: (f64, f64),
    pub beta: (f64, f64),
    pub radius_sigma: f64,
    pub time_scale_sigma: f64,
    pub mu_sigma: f64,
    pub sigma_sigma: f64,
    pub beta_sigma: f64,
}

impl Default for ParamSpace {
    fn default() -> Self {
        ParamSpace {
            radius: (2, 20),
            time_scale: (1, 20),
            mu: (0.0, 1.0),
            sigma: (0.001, 0.3),
            beta: (0.0, 1.0),
            radius_sigma: 0.5,
            time_scale_sigma: 0.5,
            mu_sigma: 0.05,
            sigma_sigma: 0.01,
            beta_sigma: 0.05,
        }
    }
}

impl ParamSpace {
    /// The default space with the radius capped so the kernel fits the
    /// grid (`2R < L`).
    pub fn for_grid(size: usize) -> Self {
        let mut s = ParamSpace::default();
        let cap = ((size.saturating_sub(1)) / 2) as u32;
        s.radius.1 = s.radius.1.min(cap);
        s
    }

    pub fn validate(&self, size: usize) -> Result<()> {
        let ok = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && a <= b;
        if self.radius.0 < 1 || self.radius.0 > self.radius.1 || 2 * self.radius.1 as usize >= size {
            return Err(Error::InvalidParameter(format!(
                "radius range [{}, {}] does not fit a {size} grid",
                self.radius.0, self.radius.1
            )));
        }
        if self.time_scale.0 < 1 || self.time_scale.0 > self.time_scale.1 {
            return Err(Error::InvalidParameter("time scale range must be within [1, ∞)".into()));
        }
        if !ok(self.mu) || !ok(self.sigma) || !ok(self.beta) || self.sigma.0 <= 0.0 {
            return Err(Error::InvalidParameter("invalid real parameter range".into()));
        }
        let sigmas = [self.radius_sigma, self.time_scale_sigma, self.mu_sigma, self.sigma_sigma, self.beta_sigma];
        if sigmas.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::InvalidParameter("mutation strengths must be finite and non-negative".into()));
        }
        Ok(())
    }

    pub fn sample_dynamics(&self, rng: &mut Rng) -> DynamicsParams {
        let int = |rng: &mut Rng, (a, b): (u32, u32)| rng.random_range(a as f64..=b as f64).round() as u32;
        let real = |rng: &mut Rng, (a, b): (f64, f64)| rng.random_range(a..=b);
        DynamicsParams {
            radius: int(rng, self.radius),
            time_scale: int(rng, self.time_scale),
            mu: real(rng, self.mu),
            sigma: real(rng, self.sigma),
            beta: [real(rng, self.beta), real(rng, self.beta), real(rng, self.beta)],
        }
    }

    /// `θᵢ ← clip(θᵢ + N(0, σ_M))`, rounded for the integer parameters.
    pub fn mutate_dynamics(&self, d: &DynamicsParams, rng: &mut Rng) -> DynamicsParams {
        let mut draw = |s: f64| if s > 0.0 { Normal::new(0.0, s).unwrap().sample(rng) } else { 0.0 };
        let r = draw(self.radius_sigma);
        let t = draw(self.time_scale_sigma);
        let m = draw(self.mu_sigma);
        let s = draw(self.sigma_sigma);
        let b = [draw(self.beta_sigma), draw(self.beta_sigma), draw(self.beta_sigma)];
        self.apply_mutation(d, [r, t, m, s, b[0], b[1], b[2]])
    }

    /// Adds the given perturbations in the order `R, T, μ, σ, β₁, β₂, β₃`,
    /// then clips and rounds.
    pub fn apply_mutation(&self, d: &DynamicsParams, delta: [f64; 7]) -> DynamicsParams {
        let int = |v: u32, dv: f64, (a, b): (u32, u32)| (v as f64 + dv).clamp(a as f64, b as f64).round() as u32;
        let real = |v: f64, dv: f64, (a, b): (f64, f64)| (v + dv).clamp(a, b);
        DynamicsParams {
            radius: int(d.radius, delta[0], self.radius),
            time_scale: int(d.time_scale, delta[1], self.time_scale),
            mu: real(d.mu, delta[2], self.mu),
            sigma: real(d.sigma, delta[3], self.sigma),
            beta: [
                real(d.beta[0], delta[4], self.beta),
                real(d.beta[1], delta[5], self.beta),
                real(d.beta[2], delta[6], self.beta),
            ],
        }
    }
}

pub fn sample_random_params(space: &ParamSpace, cppn: &MutationConfig, rng: &mut Rng) -> SystemParams {
    let genome = sample_genome(cppn, rng);
    let dynamics = space.sample_dynamics(rng);
    SystemParams { genome, dynamics }
}

pub fn mutate_params(theta: &SystemParams, space: &ParamSpace, cppn: &MutationConfig, rng: &mut Rng) -> SystemParams {
    let genome = mutate_genome(&theta.genome, cppn, rng);
    let dynamics = space.mutate_dynamics(&theta.dynamics, rng);
    SystemParams { genome, dynamics }
}
