//! `gallery`: static images of final patterns grouped by variant and class.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use lenia_core::analysis::PatternClass;
use lenia_core::goal_space::Variant;
use lenia_core::pattern::Pattern;
use lenia_core::rng::{stream_rng, Stream};
use rand::seq::SliceRandom;

use crate::config::CampaignConfig;
use crate::error::CliError;
use crate::run::{is_complete, run_dir};
use crate::store::{self, read_manifest};

#[derive(Clone, Debug, PartialEq)]
pub struct GallerySection {
    pub variant: Variant,
    pub class: PatternClass,
    /// `(run name, record index)` of each exported image.
    pub images: Vec<(String, usize)>,
    pub available: usize,
}

/// Exports up to `per_section` randomly chosen final patterns per variant
/// and class into `<out>/gallery`, with an `index.md`.
pub fn cmd_gallery(cfg: &CampaignConfig, out: &Path, filter: Option<PatternClass>) -> Result<Vec<GallerySection>, CliError> {
    let root = out.join("gallery");
    if root.exists() {
        fs::remove_dir_all(&root)?;
    }
    let classes: Vec<PatternClass> = PatternClass::ALL.into_iter().filter(|c| filter.is_none_or(|f| f == *c)).collect();
    let runs: Vec<_> = cfg.runs().into_iter().filter(|r| is_complete(cfg, out, r)).collect();
    let mut variants: Vec<Variant> = runs.iter().map(|r| r.variant).collect();
    variants.sort();
    variants.dedup();
    let mut sections = Vec::new();
    let mut index = String::from("# Gallery\n");
    for v in &variants {
        writeln!(index, "\n## {v}").unwrap();
        let mut candidates: Vec<(String, usize, PatternClass)> = Vec::new();
        for r in runs.iter().filter(|r| r.variant == *v) {
            for row in read_manifest(&run_dir(out, r))? {
                let class: PatternClass = row.class.parse().map_err(|m: String| CliError::store(&run_dir(out, r), m))?;
                candidates.push((r.name(), row.index, class));
            }
        }
        for &class in &classes {
            let mut pool: Vec<(String, usize)> =
                candidates.iter().filter(|c| c.2 == class).map(|c| (c.0.clone(), c.1)).collect();
            let available = pool.len();
            let stream = (*v as u64) * 8 + class as u64;
            pool.shuffle(&mut stream_rng(cfg.gallery.seed, Stream::Gallery, stream));
            pool.truncate(cfg.gallery.per_section);
            pool.sort();
            writeln!(index, "\n### {class} ({} of {available})\n", pool.len()).unwrap();
            if pool.is_empty() {
                writeln!(index, "No {class} patterns were found.").unwrap();
            } else {
                let dir = root.join(v.as_str()).join(class.as_str());
                fs::create_dir_all(&dir)?;
                for (name, i) in &pool {
                    let file = format!("{name}_{i:06}.png");
                    let run = cfg.runs().into_iter().find(|r| r.name() == *name).unwrap();
                    Pattern::load_lpat(store::pattern_path(&run_dir(out, &run), *i))?.save_png(dir.join(&file))?;
                    writeln!(index, "![{name} #{i}]({v}/{}/{file})", class.as_str()).unwrap();
                }
            }
            sections.push(GallerySection { variant: *v, class, images: pool, available });
        }
    }
    if variants.is_empty() {
        index.push_str("\nNo completed runs.\n");
    }
    fs::create_dir_all(&root)?;
    fs::write(root.join("index.md"), index)?;
    Ok(sections)
}

/// Human-readable dump of one manifest row.
pub fn cmd_inspect(run: &Path, index: usize) -> Result<String, CliError> {
    let rows = read_manifest(run)?;
    let row = rows
        .iter()
        .find(|r| r.index == index)
        .ok_or_else(|| CliError::store(run, format!("no record {index} among {} records", rows.len())))?;
    let mut s = String::new();
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
    w.serialize(row)?;
    let text = String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.into_error()))?).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let values = reader.records().next().unwrap()?;
    for (k, v) in headers.iter().zip(values.iter()) {
        writeln!(s, "{k:>13}: {v}").unwrap();
    }
    let genome = store::genome_path(run, index);
    writeln!(s, "{:>13}: {}", "genome", genome.display()).unwrap();
    writeln!(s, "{:>13}: {}", "pattern", store::pattern_path(run, index).display()).unwrap();
    Ok(s)
}
