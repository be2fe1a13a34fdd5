//! On-disk layout of one exploration run.
//!
//! ```text
//! <run>/run.toml            resolved campaign config plus variant and seed
//! <run>/manifest.csv        one row per record, written last
//! <run>/genomes/NNNNNN.cppn
//! <run>/patterns/NNNNNN.lpat final pattern of each record
//! <run>/checkpoints/period_NNN.lvae
//! <run>/model.lvae          final goal-space model, if any
//! <run>/loss.csv            per-epoch training losses of the online goal space
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use lenia_core::analysis::{PatternClass, StatFeatures};
use lenia_core::cppn::CppnGenome;
use lenia_core::experiment::Outcome;
use lenia_core::explorer::{RunRecord, SystemParams};
use lenia_core::goal_space::PeriodLog;
use lenia_core::lenia::DynamicsParams;
use lenia_core::pattern::Pattern;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.csv";
pub const RUN_CONFIG: &str = "run.toml";
pub const MODEL: &str = "model.lvae";
pub const LOSS: &str = "loss.csv";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub index: usize,
    pub class: String,
    pub flagged: bool,
    pub source: Option<usize>,
    pub mass: f64,
    pub volume: f64,
    pub density: f64,
    pub asymmetry: f64,
    pub centeredness: f64,
    pub movement_x: f64,
    pub movement_y: f64,
    pub radius: u32,
    pub time_scale: u32,
    pub mu: f64,
    pub sigma: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    /// Space-separated coordinates; empty when absent.
    pub goal: String,
    pub reached: String,
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ")
}

fn split(s: &str) -> Result<Vec<f64>, std::num::ParseFloatError> {
    s.split_whitespace().map(str::parse).collect()
}

impl ManifestRow {
    pub fn from_record(r: &RunRecord) -> Self {
        let f = &r.outcome.features;
        let d = &r.params.dynamics;
        ManifestRow {
            index: r.index,
            class: r.outcome.class.as_str().to_string(),
            flagged: r.outcome.flagged,
            source: r.source,
            mass: f.mass,
            volume: f.volume,
            density: f.density,
            asymmetry: f.asymmetry,
            centeredness: f.centeredness,
            movement_x: r.outcome.movement.0,
            movement_y: r.outcome.movement.1,
            radius: d.radius,
            time_scale: d.time_scale,
            mu: d.mu,
            sigma: d.sigma,
            beta1: d.beta[0],
            beta2: d.beta[1],
            beta3: d.beta[2],
            goal: r.goal.as_deref().map(join).unwrap_or_default(),
            reached: join(&r.reached),
        }
    }
}

pub fn genome_path(dir: &Path, index: usize) -> PathBuf {
    dir.join("genomes").join(format!("{index:06}.cppn"))
}

pub fn pattern_path(dir: &Path, index: usize) -> PathBuf {
    dir.join("patterns").join(format!("{index:06}.lpat"))
}

pub fn checkpoint_path(dir: &Path, period: usize) -> PathBuf {
    dir.join("checkpoints").join(format!("period_{period:03}.lvae"))
}

pub fn prepare(dir: &Path) -> Result<(), CliError> {
    for sub in ["genomes", "patterns", "checkpoints"] {
        fs::create_dir_all(dir.join(sub))?;
    }
    Ok(())
}

/// Writes `bytes` to a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_record_files(dir: &Path, r: &RunRecord) -> Result<(), CliError> {
    fs::write(genome_path(dir, r.index), r.params.genome.to_text())?;
    r.outcome.last.save_lpat(pattern_path(dir, r.index))?;
    Ok(())
}

pub fn manifest_bytes(records: &[RunRecord]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(ManifestRow::from_record(r))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

pub fn write_manifest(dir: &Path, records: &[RunRecord]) -> Result<(), CliError> {
    write_atomic(&dir.join(MANIFEST), &manifest_bytes(records)?)
}

pub fn loss_bytes(periods: &[PeriodLog]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["period", "iteration", "train_size", "valid_size", "recent", "epoch", "train_loss", "valid_loss"])?;
    for p in periods {
        for e in &p.epochs {
            w.write_record([
                p.period.to_string(),
                p.iteration.to_string(),
                p.train_size.to_string(),
                p.valid_size.to_string(),
                p.recent.to_string(),
                e.epoch.to_string(),
                format!("{:?}", e.train_loss),
                e.valid_loss.map(|v| format!("{v:?}")).unwrap_or_default(),
            ])?;
        }
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

pub fn read_manifest(dir: &Path) -> Result<Vec<ManifestRow>, CliError> {
    let mut r = csv::Reader::from_path(dir.join(MANIFEST))?;
    Ok(r.deserialize().collect::<Result<Vec<ManifestRow>, _>>()?)
}

/// Number of rows of a complete manifest, or `None` when there is none.
pub fn manifest_len(dir: &Path) -> Option<usize> {
    read_manifest(dir).ok().map(|rows| rows.len())
}

/// Rebuilds the history of a finished run.
pub fn load_records(dir: &Path, seed: u64) -> Result<Vec<RunRecord>, CliError> {
    let rows = read_manifest(dir)?;
    rows.into_iter()
        .map(|row| {
            let bad = |m: String| CliError::store(dir, format!("record {}: {m}", row.index));
            let genome = CppnGenome::from_text(&fs::read_to_string(genome_path(dir, row.index))?)?;
            let last = Pattern::load_lpat(pattern_path(dir, row.index))?;
            let class: PatternClass = row.class.parse().map_err(bad)?;
            let goal = if row.goal.is_empty() { None } else { Some(split(&row.goal).map_err(|e| bad(e.to_string()))?) };
            let reached = split(&row.reached).map_err(|e| bad(e.to_string()))?;
            Ok(RunRecord {
                index: row.index,
                params: SystemParams {
                    genome,
                    dynamics: DynamicsParams {
                        radius: row.radius,
                        time_scale: row.time_scale,
                        mu: row.mu,
                        sigma: row.sigma,
                        beta: [row.beta1, row.beta2, row.beta3],
                    },
                },
                goal,
                reached,
                source: row.source,
                outcome: Outcome {
                    last: Arc::new(last),
                    features: StatFeatures {
                        mass: row.mass,
                        volume: row.volume,
                        density: row.density,
                        asymmetry: row.asymmetry,
                        centeredness: row.centeredness,
                    },
                    class,
                    movement: (row.movement_x, row.movement_y),
                    flagged: row.flagged,
                },
                seed,
            })
        })
        .collect()
}
