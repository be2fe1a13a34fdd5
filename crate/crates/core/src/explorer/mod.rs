//! The exploration loop: random bootstrap, then goal sampling,
//! nearest-neighbor selection and mutation.

mod params;

pub use params::{mutate_params, sample_random_params, ParamSpace, SystemParams};

use crate::cppn::MutationConfig;
use crate::error::{Error, Result};
use crate::experiment::{run_experiment, Outcome};
use crate::goal_space::{GoalSpace, HgsRanges, OnlineConfig, OnlineTrainer, PeriodLog, Variant, LATENT_BOUND};
use crate::lenia::{DEFAULT_GRID, DEFAULT_STEPS};
use crate::nn::{Init, Vae, VaeConfig};
use crate::rng::{stream_rng, Stream};

/// One entry of the history.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    /// Position in the history, from 1.
    pub index: usize,
    pub params: SystemParams,
    /// The target goal; absent for random iterations.
    pub goal: Option<Vec<f64>>,
    /// Encoding of the outcome under the current goal space; empty for pure
    /// random exploration.
    pub reached: Vec<f64>,
    /// Index of the record whose parameters were mutated.
    pub source: Option<usize>,
    pub outcome: Outcome,
    /// Master seed; the iteration stream is `(seed, Iteration, index)`.
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExploreConfig {
    pub variant: Variant,
    /// Total iterations `N`.
    pub iterations: usize,
    /// Random bootstrap iterations `N_init`.
    pub init_iterations: usize,
    pub seed: u64,
    /// Grid width `L`.
    pub size: usize,
    /// Rollout length `M`.
    pub steps: usize,
    pub params: ParamSpace,
    pub cppn: MutationConfig,
    pub hgs: HgsRanges,
    /// Shape of network encoders; the input size is taken from `size`.
    pub vae: VaeConfig,
    pub goal_bound: f64,
    pub online: OnlineConfig,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        ExploreConfig {
            variant: Variant::Ogl,
            iterations: 5000,
            init_iterations: 1000,
            seed: 0,
            size: DEFAULT_GRID,
            steps: DEFAULT_STEPS,
            params: ParamSpace::default(),
            cppn: MutationConfig::default(),
            hgs: HgsRanges::default(),
            vae: VaeConfig::default(),
            goal_bound: LATENT_BOUND,
            online: OnlineConfig::default(),
        }
    }
}

impl ExploreConfig {
    pub fn vae_config(&self) -> VaeConfig {
        VaeConfig { size: self.size, ..self.vae }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("at least one iteration is required".into()));
        }
        if self.init_iterations > self.iterations {
            return Err(Error::InvalidParameter(format!(
                "bootstrap iterations {} exceed total iterations {}",
                self.init_iterations, self.iterations
            )));
        }
        if self.variant.uses_goals() && self.init_iterations == 0 {
            return Err(Error::InvalidParameter("goal exploration needs at least one bootstrap iteration".into()));
        }
        if self.steps < 2 {
            return Err(Error::InvalidParameter("rollouts need at least 2 steps".into()));
        }
        self.params.validate(self.size)?;
        self.cppn.validate()?;
        self.hgs.validate()?;
        if matches!(self.variant, Variant::Rgs | Variant::Pgl | Variant::Ogl) {
            self.vae_config().validate()?;
        }
        self.online.validate()
    }
}

/// Progress notifications from [`explore`].
#[derive(Debug)]
pub enum Event<'a> {
    Iteration(&'a RunRecord),
    Trained { log: &'a PeriodLog, vae: &'a Vae },
}

#[derive(Clone, Debug)]
pub struct Exploration {
    pub history: Vec<RunRecord>,
    pub goal_space: Option<GoalSpace>,
    pub periods: Vec<PeriodLog>,
}

/// Index into `reached` of the goal nearest to `goal`, lowest index on
/// ties.
pub fn select_source<'a>(goal: &[f64], reached: impl IntoIterator<Item = &'a [f64]>) -> Result<usize> {
    let mut best: Option<(f64, usize)> = None;
    for (i, g) in reached.into_iter().enumerate() {
        if g.len() != goal.len() {
            return Err(Error::InvalidArgument(format!("goal of dimension {} against {}", goal.len(), g.len())));
        }
        let d: f64 = g.iter().zip(goal).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.is_none_or(|(b, _)| d < b) {
            best = Some((d, i));
        }
    }
    best.map(|(_, i)| i).ok_or(Error::EmptyHistory)
}

fn build_goal_space(cfg: &ExploreConfig, pretrained: Option<Vae>) -> Result<Option<GoalSpace>> {
    let mut rng = stream_rng(cfg.seed, Stream::GoalSpace, 0);
    Ok(match cfg.variant {
        Variant::Random => None,
        Variant::Hgs => Some(GoalSpace::hand_defined(cfg.hgs)?),
        Variant::Rgs => Some(GoalSpace::random(cfg.vae_config(), &mut rng)?),
        Variant::Pgl => {
            let vae = pretrained.ok_or_else(|| Error::InvalidArgument("the pretrained goal space needs a model".into()))?;
            if vae.config().size != cfg.size {
                return Err(Error::InvalidArgument(format!(
                    "pretrained model expects {} cells per side, the grid has {}",
                    vae.config().size,
                    cfg.size
                )));
            }
            Some(GoalSpace::learned(Variant::Pgl, vae, cfg.goal_bound)?)
        }
        Variant::Ogl => {
            let vae = Vae::new(cfg.vae_config(), Init::FanIn, &mut rng)?;
            Some(GoalSpace::learned(Variant::Ogl, vae, cfg.goal_bound)?)
        }
    })
}

/// Runs `cfg.iterations` experiments and returns the history. `pretrained`
/// is required by the pretrained goal space and ignored otherwise.
pub fn explore(cfg: &ExploreConfig, pretrained: Option<Vae>, mut on_event: impl FnMut(Event<'_>)) -> Result<Exploration> {
    cfg.validate()?;
    let mut goal_space = build_goal_space(cfg, pretrained)?;
    let mut online = match (&goal_space, cfg.variant) {
        (Some(gs), Variant::Ogl) => Some(OnlineTrainer::new(gs.vae().unwrap().clone(), cfg.online, cfg.seed)?),
        _ => None,
    };
    let mut history: Vec<RunRecord> = Vec::with_capacity(cfg.iterations);
    for index in 1..=cfg.iterations {
        let mut rng = stream_rng(cfg.seed, Stream::Iteration, index as u64);
        let (params, goal, source) = match &goal_space {
            Some(gs) if index > cfg.init_iterations => {
                let goal = gs.sample(history.iter().map(|r| r.reached.as_slice()), &mut rng)?;
                let k = select_source(&goal, history.iter().map(|r| r.reached.as_slice()))?;
                let params = mutate_params(&history[k].params, &cfg.params, &cfg.cppn, &mut rng);
                (params, Some(goal), Some(k + 1))
            }
            _ => (sample_random_params(&cfg.params, &cfg.cppn, &mut rng), None, None),
        };
        let outcome = run_experiment(&params, cfg.size, cfg.steps, cfg.cppn.passes)?;
        let reached = match &goal_space {
            Some(gs) => gs.encode(&outcome.last, &outcome.features)?,
            None => Vec::new(),
        };
        if let Some(t) = online.as_mut() {
            t.observe(outcome.last.clone(), outcome.class);
        }
        history.push(RunRecord { index, params, goal, reached, source, outcome, seed: cfg.seed });
        on_event(Event::Iteration(history.last().unwrap()));

        if let (Some(t), Some(gs)) = (online.as_mut(), goal_space.as_mut()) {
            if t.maybe_train(index)?.is_some() {
                let log = t.periods().last().unwrap();
                if !log.skipped() {
                    gs.set_vae(t.vae().clone())?;
                    reencode(gs, &mut history)?;
                }
                on_event(Event::Trained { log, vae: t.vae() });
            }
        }
    }
    let periods = online.map(|t| t.periods().to_vec()).unwrap_or_default();
    Ok(Exploration { history, goal_space, periods })
}

/// Recomputes every reached goal under the current encoder.
pub fn reencode(gs: &GoalSpace, history: &mut [RunRecord]) -> Result<()> {
    let items: Vec<_> = history.iter().map(|r| (&*r.outcome.last, &r.outcome.features)).collect();
    let encoded = gs.encode_all(&items)?;
    for (r, g) in history.iter_mut().zip(encoded) {
        r.reached = g;
    }
    Ok(())
}
