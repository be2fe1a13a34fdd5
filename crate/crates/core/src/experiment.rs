//! One experiment: render the initial state, simulate, measure the result.

use std::sync::Arc;

use crate::analysis::{classify_final, features_from_final, CenterTracker, PatternClass, StatFeatures};
use crate::cppn::render_pattern;
use crate::error::Result;
use crate::explorer::SystemParams;
use crate::lenia::Simulator;
use crate::pattern::Pattern;

/// What remains of a rollout once it is finished.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub last: Arc<Pattern>,
    pub features: StatFeatures,
    pub class: PatternClass,
    /// Center displacement over the final step.
    pub movement: (f64, f64),
    /// The simulation produced non-finite values; the outcome is reported
    /// as dead.
    pub flagged: bool,
}

/// Runs `θ` for `steps` states on a `size` grid.
pub fn run_experiment(theta: &SystemParams, size: usize, steps: usize, passes: usize) -> Result<Outcome> {
    let initial = render_pattern(&theta.genome, size, passes);
    let mut sim = Simulator::new(&theta.dynamics, size)?;
    let mut tracker = CenterTracker::new();
    let mut penultimate = None;
    let mut previous: Option<Pattern> = None;
    let last = sim.run(initial, steps, |_, s| {
        tracker.observe(s);
        penultimate = previous.replace(s.clone());
    })?;
    let penultimate = penultimate.unwrap_or_else(|| last.clone());
    let flagged = last.cells().iter().any(|v| !v.is_finite());
    if flagged {
        let last = Pattern::zeros(size);
        return Ok(Outcome {
            features: features_from_final(&last, &last, (0.0, 0.0)),
            last: Arc::new(last),
            class: PatternClass::Dead,
            movement: (0.0, 0.0),
            flagged,
        });
    }
    let class = classify_final(&penultimate, &last, theta.dynamics.radius);
    let movement = tracker.movement();
    let features = features_from_final(&last, &tracker.centered(&last), movement);
    Ok(Outcome { last: Arc::new(last), features, class, movement, flagged })
}
