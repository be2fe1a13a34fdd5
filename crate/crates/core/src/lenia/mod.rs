//! The Lenia continuous cellular automaton on a square torus.
//!
//! One step computes the potential `U = K * A` with a unit-sum shell kernel
//! and applies `A ← clip(A + G(U; μ, σ) / T, 0, 1)` where `G` is the
//! exponential growth mapping. Cells are 32-bit; potentials and growth are
//! evaluated in 64 bits.

mod convolve;
mod kernel;

pub use convolve::{convolve_direct, Backend, SpectralConvolver, SPECTRAL_THRESHOLD};
pub use kernel::{kernel_core, kernel_shell, Kernel, CORE_ALPHA, SHELL_RINGS};

use crate::error::{Error, Result};
use crate::pattern::{clip_unit, Pattern};

/// Default grid width.
pub const DEFAULT_GRID: usize = 256;
/// Default rollout length.
pub const DEFAULT_STEPS: usize = 200;

/// Settings of the update rule.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicsParams {
    /// Kernel radius `R` in cells.
    pub radius: u32,
    /// Time resolution `T`; each step integrates `1/T` of the growth.
    pub time_scale: u32,
    /// Growth center `μ`.
    pub mu: f64,
    /// Growth width `σ`.
    pub sigma: f64,
    /// Peaks of the three kernel shells.
    pub beta: [f64; 3],
}

impl DynamicsParams {
    pub fn validate(&self) -> Result<()> {
        if self.radius < 1 {
            return Err(Error::InvalidParameter("radius must be at least 1".into()));
        }
        if self.time_scale < 1 {
            return Err(Error::InvalidParameter("time scale must be at least 1".into()));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !self.mu.is_finite() || self.beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter("non-finite dynamics parameter".into()));
        }
        Ok(())
    }
}

/// Exponential growth mapping `2 exp(−(u − μ)² / 2σ²) − 1`.
pub fn growth_mapping(u: f64, mu: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    Ok(growth(u, mu, sigma))
}

#[inline]
fn growth(u: f64, mu: f64, sigma: f64) -> f64 {
    let d = u - mu;
    2.0 * (-(d * d) / (2.0 * sigma * sigma)).exp() - 1.0
}

/// A simulated trajectory `A^1 .. A^M`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rollout {
    steps: Vec<Pattern>,
}

impl Rollout {
    /// Wraps an existing trajectory; at least two steps are required.
    pub fn new(steps: Vec<Pattern>) -> Result<Rollout> {
        if steps.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a rollout needs at least 2 steps, got {}",
                steps.len()
            )));
        }
        let size = steps[0].size();
        if steps.iter().any(|s| s.size() != size) {
            return Err(Error::InvalidArgument("rollout steps differ in size".into()));
        }
        Ok(Rollout { steps })
    }

    pub fn steps(&self) -> &[Pattern] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn first(&self) -> &Pattern {
        &self.steps[0]
    }

    pub fn last(&self) -> &Pattern {
        &self.steps[self.steps.len() - 1]
    }

    pub fn penultimate(&self) -> &Pattern {
        &self.steps[self.steps.len() - 2]
    }
}

enum Convolver {
    Direct,
    Spectral(SpectralConvolver),
}

/// Steps one parameter setting repeatedly, reusing the kernel transform.
pub struct Simulator {
    params: DynamicsParams,
    kernel: Kernel,
    convolver: Convolver,
    potential: Vec<f64>,
}

impl Simulator {
    pub fn new(params: &DynamicsParams, size: usize) -> Result<Simulator> {
        Simulator::with_backend(params, size, Backend::Auto)
    }

    pub fn with_backend(params: &DynamicsParams, size: usize, backend: Backend) -> Result<Simulator> {
        params.validate()?;
        let kernel = Kernel::new(params, size)?;
        Ok(Simulator::from_kernel(params.clone(), kernel, backend))
    }

    fn from_kernel(params: DynamicsParams, kernel: Kernel, backend: Backend) -> Simulator {
        let size = kernel.size();
        let convolver = match backend.resolve(size) {
            Backend::Spectral => Convolver::Spectral(SpectralConvolver::new(&kernel)),
            _ => Convolver::Direct,
        };
        Simulator {
            params,
            kernel,
            convolver,
            potential: vec![0.0; size * size],
        }
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn params(&self) -> &DynamicsParams {
        &self.params
    }

    /// Computes `K * A` into an internal buffer.
    pub fn potential(&mut self, state: &Pattern) -> Result<&[f64]> {
        if state.size() != self.kernel.size() {
            return Err(Error::InvalidArgument(format!(
                "pattern is {0}x{0} but the kernel is {1}x{1}",
                state.size(),
                self.kernel.size()
            )));
        }
        match &mut self.convolver {
            Convolver::Direct => convolve_direct(&self.kernel, state.cells(), &mut self.potential),
            Convolver::Spectral(s) => s.convolve(state.cells(), &mut self.potential),
        }
        Ok(&self.potential)
    }

    pub fn step(&mut self, state: &Pattern) -> Result<Pattern> {
        self.potential(state)?;
        let dt = 1.0 / self.params.time_scale as f64;
        let (mu, sigma) = (self.params.mu, self.params.sigma);
        let cells = state
            .cells()
            .iter()
            .zip(&self.potential)
            .map(|(&a, &u)| clip_unit((a as f64 + dt * growth(u, mu, sigma)) as f32))
            .collect();
        Ok(Pattern::from_cells_unchecked(state.size(), cells))
    }

    /// Runs `steps` states starting from `initial` (which counts as the
    /// first), calling `observe(t, state)` for `t = 0 .. steps` in order, and
    /// returns the final state.
    pub fn run(
        &mut self,
        initial: Pattern,
        steps: usize,
        mut observe: impl FnMut(usize, &Pattern),
    ) -> Result<Pattern> {
        if steps < 1 {
            return Err(Error::InvalidArgument("at least one step is required".into()));
        }
        let mut state = initial;
        observe(0, &state);
        for t in 1..steps {
            state = self.step(&state)?;
            observe(t, &state);
        }
        Ok(state)
    }
}

/// One update of `state` under `params` with a prepared kernel.
pub fn step(state: &Pattern, params: &DynamicsParams, kernel: &Kernel) -> Result<Pattern> {
    params.validate()?;
    if kernel.size() != state.size() {
        return Err(Error::InvalidArgument(format!(
            "pattern is {0}x{0} but the kernel is {1}x{1}",
            state.size(),
            kernel.size()
        )));
    }
    Simulator::from_kernel(params.clone(), kernel.clone(), Backend::Auto).step(state)
}

/// Simulates `steps` states from `initial`; `steps[0] == initial`.
pub fn rollout(initial: &Pattern, params: &DynamicsParams, steps: usize) -> Result<Rollout> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("a rollout needs at least 2 steps, got {steps}")));
    }
    let mut sim = Simulator::new(params, initial.size())?;
    let mut states = Vec::with_capacity(steps);
    sim.run(initial.clone(), steps, |_, s| states.push(s.clone()))?;
    Rollout::new(states)
}
