//! `evaluate`: score completed runs in the analytic spaces.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use lenia_core::analysis::PatternClass;
use lenia_core::evaluation::{
    behavior_points, class_proportions, diversity, diversity_curve, initial_states, parameter_points, ranking,
    train_analytic_vae, welch_t, AnalyticSpace, DiversityConfig,
};
use lenia_core::explorer::RunRecord;
use lenia_core::goal_space::Variant;
use lenia_core::nn::{EpochStats, Vae};
use lenia_core::pattern::Pattern;
use lenia_core::rng::{stream_rng, Stream};
use rand::seq::SliceRandom;

use crate::config::{CampaignConfig, RunSpec};
use crate::error::CliError;
use crate::run::{is_complete, run_dir};
use crate::store::{self, write_atomic};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceKind {
    Behavior,
    Parameter,
}

impl SpaceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SpaceKind::Behavior => "behavior",
            SpaceKind::Parameter => "parameter",
        }
    }
}

/// Class filters reported: all records, then each class.
pub const FILTERS: [Option<PatternClass>; 4] =
    [None, Some(PatternClass::Animal), Some(PatternClass::NonAnimal), Some(PatternClass::Dead)];

fn filter_name(f: Option<PatternClass>) -> &'static str {
    f.map(PatternClass::as_str).unwrap_or("all")
}

#[derive(Clone, Debug, PartialEq)]
pub struct FinalDiversity {
    pub space: SpaceKind,
    pub class: Option<PatternClass>,
    pub bins: usize,
    pub diversity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunScore {
    pub run: RunSpec,
    pub proportions: [f64; 3],
    pub finals: Vec<FinalDiversity>,
}

impl RunScore {
    pub fn diversity(&self, space: SpaceKind, class: Option<PatternClass>, bins: usize) -> Option<usize> {
        self.finals.iter().find(|f| f.space == space && f.class == class && f.bins == bins).map(|f| f.diversity)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationReport {
    pub scores: Vec<RunScore>,
    pub missing: Vec<String>,
    pub bins: Vec<usize>,
}

impl EvaluationReport {
    pub fn variants(&self) -> Vec<Variant> {
        self.scores.iter().map(|s| s.run.variant).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Diversity of `variant` for `seed`.
    pub fn get(&self, variant: Variant, seed: u64, space: SpaceKind, class: Option<PatternClass>, bins: usize) -> Option<usize> {
        self.scores
            .iter()
            .find(|s| s.run.variant == variant && s.run.seed == seed)
            .and_then(|s| s.diversity(space, class, bins))
    }

    pub fn samples(&self, variant: Variant, space: SpaceKind, class: Option<PatternClass>, bins: usize) -> Vec<f64> {
        self.scores
            .iter()
            .filter(|s| s.run.variant == variant)
            .filter_map(|s| s.diversity(space, class, bins))
            .map(|d| d as f64)
            .collect()
    }

    pub fn mean(&self, variant: Variant, space: SpaceKind, class: Option<PatternClass>, bins: usize) -> f64 {
        let s = self.samples(variant, space, class, bins);
        s.iter().sum::<f64>() / s.len().max(1) as f64
    }

    /// Variants ordered by decreasing mean diversity.
    pub fn ranking(&self, space: SpaceKind, class: Option<PatternClass>, bins: usize) -> Vec<Variant> {
        let vs = self.variants();
        let means: Vec<f64> = vs.iter().map(|&v| self.mean(v, space, class, bins)).collect();
        ranking(&means).into_iter().map(|i| vs[i]).collect()
    }
}

/// Pools up to `max` patterns (all when 0) with a seeded shuffle.
fn pool(mut patterns: Vec<Pattern>, max: usize, seed: u64, index: u64) -> Vec<Pattern> {
    if max > 0 && patterns.len() > max {
        patterns.shuffle(&mut stream_rng(seed, Stream::Evaluation, index));
        patterns.truncate(max);
    }
    patterns
}

fn analytic_model(
    cfg: &CampaignConfig,
    path: &Path,
    patterns: impl FnOnce() -> Vec<Pattern>,
    index: u64,
    log: &mut Vec<(String, EpochStats)>,
    label: &str,
) -> Result<Vae, CliError> {
    if path.exists() {
        let vae = Vae::load(path)?;
        if *vae.config() == cfg.analytic_vae() {
            return Ok(vae);
        }
    }
    let ev = &cfg.evaluation;
    let data = pool(patterns(), ev.max_pool, ev.seed, index);
    eprintln!("evaluate: training the {label} model on {} patterns", data.len());
    let mut rng = stream_rng(ev.seed, Stream::Evaluation, 100 + index);
    let report = train_analytic_vae(data, cfg.analytic_vae(), &cfg.analytic_fit(), &mut rng)?;
    log.extend(report.epochs.iter().map(|e| (label.to_string(), *e)));
    report.best.save(path)?;
    Ok(report.best)
}

/// Scores every complete run of the campaign in `out`.
pub fn cmd_evaluate(cfg: &CampaignConfig, out: &Path) -> Result<EvaluationReport, CliError> {
    let mut runs = Vec::new();
    let mut missing = Vec::new();
    for r in cfg.runs() {
        if is_complete(cfg, out, &r) {
            let records = store::load_records(&run_dir(out, &r), r.seed)?;
            runs.push((r, records));
        } else {
            eprintln!("evaluate: warning: {} is missing or incomplete, skipped", r.name());
            missing.push(r.name());
        }
    }
    if runs.is_empty() {
        return Err(CliError::Partial { failed: missing.len(), total: missing.len() });
    }
    let dir = out.join("evaluation");
    fs::create_dir_all(&dir)?;
    let ev = &cfg.evaluation;
    let grid = cfg.exploration.grid;
    let passes = cfg.exploration.cppn_passes;
    let alive = |r: &&RunRecord| ev.pool_dead || r.outcome.class != PatternClass::Dead;
    let mut loss_log = Vec::new();
    let behavior_vae = analytic_model(
        cfg,
        &dir.join("behavior.lvae"),
        || runs.iter().flat_map(|(_, h)| h.iter().filter(alive).map(|r| (*r.outcome.last).clone())).collect(),
        0,
        &mut loss_log,
        "behavior",
    )?;
    let parameter_vae = analytic_model(
        cfg,
        &dir.join("parameter.lvae"),
        || runs.iter().flat_map(|(_, h)| initial_states(&h.iter().filter(alive).cloned().collect::<Vec<_>>(), grid, passes)).collect(),
        1,
        &mut loss_log,
        "parameter",
    )?;
    if !loss_log.is_empty() {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["model", "epoch", "train_loss", "valid_loss"])?;
        for (m, e) in &loss_log {
            w.write_record([m.clone(), e.epoch.to_string(), format!("{:?}", e.train_loss), e.valid_loss.map(|v| format!("{v:?}")).unwrap_or_default()])?;
        }
        write_atomic(&dir.join("analytic_loss.csv"), &w.into_inner().map_err(|e| CliError::Io(e.into_error()))?)?;
    }

    let latent = cfg.evaluation.latent;
    let spaces = [
        (SpaceKind::Behavior, AnalyticSpace::behavior(latent)),
        (SpaceKind::Parameter, AnalyticSpace::parameter(latent)),
    ];
    let mut bins: Vec<usize> = ev.sensitivity_bins.clone();
    bins.push(ev.bins);
    bins.sort_unstable();
    bins.dedup();

    let mut curves = csv::Writer::from_writer(Vec::new());
    curves.write_record(["variant", "seed", "space", "class", "iteration", "diversity"])?;
    let mut finals_csv = csv::Writer::from_writer(Vec::new());
    finals_csv.write_record(["variant", "seed", "space", "class", "bins", "diversity"])?;
    let mut props = csv::Writer::from_writer(Vec::new());
    props.write_record(["variant", "seed", "dead", "animal", "non_animal"])?;
    let mut latents = [csv::Writer::from_writer(Vec::new()), csv::Writer::from_writer(Vec::new())];
    for (w, (_, space)) in latents.iter_mut().zip(&spaces) {
        let mut header = vec!["variant".to_string(), "seed".into(), "index".into(), "class".into()];
        header.extend(space.names.iter().cloned());
        w.write_record(&header)?;
    }

    let mut scores = Vec::new();
    for (run, records) in &runs {
        let classes: Vec<PatternClass> = records.iter().map(|r| r.outcome.class).collect();
        let points = [behavior_points(records, &behavior_vae)?, parameter_points(records, &parameter_vae, passes)?];
        let proportions = class_proportions(&classes);
        props.write_record([run.variant.to_string(), run.seed.to_string(), format!("{:?}", proportions[0]), format!("{:?}", proportions[1]), format!("{:?}", proportions[2])])?;
        let mut finals = Vec::new();
        for (k, ((kind, space), pts)) in spaces.iter().zip(&points).enumerate() {
            for (r, p) in records.iter().zip(pts) {
                let mut row = vec![run.variant.to_string(), run.seed.to_string(), r.index.to_string(), r.outcome.class.to_string()];
                row.extend(p.iter().map(|v| format!("{v:?}")));
                latents[k].write_record(&row)?;
            }
            for filter in FILTERS {
                let curve = diversity_curve(pts, &classes, space, DiversityConfig { bins_inside: ev.bins }, filter)?;
                for (i, d) in curve.iter().enumerate() {
                    curves.write_record([run.variant.to_string(), run.seed.to_string(), kind.as_str().into(), filter_name(filter).into(), (i + 1).to_string(), d.to_string()])?;
                }
                for &b in &bins {
                    let selected: Vec<Vec<f64>> =
                        pts.iter().zip(&classes).filter(|(_, &c)| filter.is_none_or(|f| f == c)).map(|(p, _)| p.clone()).collect();
                    let d = diversity(&selected, space, DiversityConfig { bins_inside: b })?;
                    finals_csv.write_record([run.variant.to_string(), run.seed.to_string(), kind.as_str().into(), filter_name(filter).into(), b.to_string(), d.to_string()])?;
                    finals.push(FinalDiversity { space: *kind, class: filter, bins: b, diversity: d });
                }
            }
        }
        scores.push(RunScore { run: run.clone(), proportions, finals });
    }
    let report = EvaluationReport { scores, missing, bins: bins.clone() };

    let mut sig = csv::Writer::from_writer(Vec::new());
    sig.write_record(["space", "class", "a", "b", "mean_a", "mean_b", "t", "df", "p"])?;
    let variants = report.variants();
    for (kind, _) in &spaces {
        for filter in FILTERS {
            for (i, &a) in variants.iter().enumerate() {
                for &b in &variants[i + 1..] {
                    let (sa, sb) = (report.samples(a, *kind, filter, ev.bins), report.samples(b, *kind, filter, ev.bins));
                    if let Ok(w) = welch_t(&sa, &sb) {
                        sig.write_record([kind.as_str().to_string(), filter_name(filter).into(), a.to_string(), b.to_string(), format!("{:?}", report.mean(a, *kind, filter, ev.bins)), format!("{:?}", report.mean(b, *kind, filter, ev.bins)), format!("{:?}", w.t), format!("{:?}", w.df), format!("{:?}", w.p)])?;
                    }
                }
            }
        }
    }
    let mut sens = csv::Writer::from_writer(Vec::new());
    sens.write_record(["space", "bins", "variant", "mean_diversity", "rank"])?;
    for (kind, _) in &spaces {
        for &b in &bins {
            for (rank, v) in report.ranking(*kind, None, b).into_iter().enumerate() {
                sens.write_record([kind.as_str().to_string(), b.to_string(), v.to_string(), format!("{:?}", report.mean(v, *kind, None, b)), (rank + 1).to_string()])?;
            }
        }
    }
    let done = |w: csv::Writer<Vec<u8>>| w.into_inner().map_err(|e| CliError::Io(e.into_error()));
    write_atomic(&dir.join("diversity_curves.csv"), &done(curves)?)?;
    write_atomic(&dir.join("final_diversity.csv"), &done(finals_csv)?)?;
    write_atomic(&dir.join("proportions.csv"), &done(props)?)?;
    write_atomic(&dir.join("significance.csv"), &done(sig)?)?;
    write_atomic(&dir.join("bin_sensitivity.csv"), &done(sens)?)?;
    let [lb, lp] = latents;
    write_atomic(&dir.join("latents_behavior.csv"), &done(lb)?)?;
    write_atomic(&dir.join("latents_parameter.csv"), &done(lp)?)?;
    Ok(report)
}
