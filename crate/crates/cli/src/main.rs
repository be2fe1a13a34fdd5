use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use lenia_cli::run::CAMPAIGN_CONFIG;
use lenia_cli::{cmd_evaluate, cmd_gallery, cmd_inspect, cmd_run, CampaignConfig, CliError};
use lenia_core::analysis::PatternClass;

#[derive(Parser)]
#[command(name = "lenia-explore", version, about = "Goal exploration campaigns in Lenia")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every exploration of a campaign, skipping completed ones.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to `campaign.output` of the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Runs executed concurrently.
        #[arg(long)]
        parallel: Option<usize>,
        /// Replace each experiment's seeds by consecutive seeds from this value.
        #[arg(long)]
        seed_override: Option<u64>,
    },
    /// Score completed runs in the analytic spaces.
    Evaluate {
        #[arg(long)]
        out: PathBuf,
        /// Defaults to the copy saved by `run`.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Export images of final patterns grouped by variant and class.
    Gallery {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// dead, animal or non-animal.
        #[arg(long)]
        filter: Option<PatternClass>,
    },
    /// Print one record of a run directory.
    Inspect { run: PathBuf, index: usize },
}

fn campaign(config: Option<PathBuf>, out: &std::path::Path) -> Result<CampaignConfig, CliError> {
    CampaignConfig::load(&config.unwrap_or_else(|| out.join(CAMPAIGN_CONFIG)))
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { config, out, parallel, seed_override } => {
            let mut cfg = CampaignConfig::load(&config)?;
            if let Some(s) = seed_override {
                cfg.override_seeds(s);
            }
            let out = out.unwrap_or_else(|| cfg.campaign.output.clone());
            let parallel = parallel.unwrap_or(cfg.campaign.parallel);
            let summary = cmd_run(&cfg, &out, parallel)?;
            eprintln!(
                "{} completed, {} skipped, {} failed",
                summary.completed.len(),
                summary.skipped.len(),
                summary.failed.len()
            );
            if !summary.failed.is_empty() {
                let total = summary.completed.len() + summary.skipped.len() + summary.failed.len();
                return Err(CliError::Partial { failed: summary.failed.len(), total }.into());
            }
        }
        Command::Evaluate { out, config } => {
            let cfg = campaign(config, &out)?;
            let report = cmd_evaluate(&cfg, &out)?;
            eprintln!("scored {} runs into {}", report.scores.len(), out.join("evaluation").display());
            if !report.missing.is_empty() {
                let total = report.scores.len() + report.missing.len();
                return Err(CliError::Partial { failed: report.missing.len(), total }.into());
            }
        }
        Command::Gallery { out, config, filter } => {
            let cfg = campaign(config, &out)?;
            let sections = cmd_gallery(&cfg, &out, filter)?;
            let images: usize = sections.iter().map(|s| s.images.len()).sum();
            eprintln!("exported {images} images to {}", out.join("gallery").display());
        }
        Command::Inspect { run, index } => {
            print!("{}", cmd_inspect(&run, index).with_context(|| format!("inspecting {}", run.display()))?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<CliError>().map(CliError::exit_code).unwrap_or(1);
            ExitCode::from(code)
        }
    }
}
