use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use somkit::datamix::OutputFormat;
use somkit::eval::MatchPolicy;
use somkit::pipeline::{self, GenKind, PipelineConfig, RunResult};
use somkit::textgen::PromptMode;
use somkit::Result;

/// Set-of-Mark dataset tooling.
///
/// The machine-readable summary of each command goes to stdout; progress and
/// diagnostics go to stderr. Exit status: 0 ok, 2 configuration, 3 data,
/// 4 I/O or network.
#[derive(Parser)]
#[command(name = "somkit", version)]
struct Cli {
    /// Pipeline configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (and in-flight model requests).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Answer model requests from `<dir>/<bundle hash>.txt`.
    #[arg(long, global = true)]
    replay: Option<PathBuf>,
    /// Fail if any image fails.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Place numbered tags on annotated images.
    Tag {
        #[arg(long)]
        annotations: Option<PathBuf>,
        /// Directory with the source images.
        #[arg(long)]
        images: Option<PathBuf>,
        /// Output directory for tagged PNGs and sidecars.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Granularity level, 1 (coarse) to 3 (fine).
        #[arg(long)]
        level: Option<u8>,
    },
    /// Generate "list the tagged items" conversation records.
    GenListing {
        /// Directory of tagged PNGs and sidecars; defaults to the config's output_dir.
        #[arg(long)]
        tags: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Generate question-answer conversation records through the model.
    GenQa {
        #[arg(long)]
        tags: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Share of texts containing a listing, per file.
    Probe {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// List-wise accuracy of predicted listings against gold.
    Score {
        #[arg(long)]
        pred: PathBuf,
        /// Sidecar directory, single sidecar, or listing records.
        #[arg(long)]
        gold: PathBuf,
        /// Compare normalised descriptions only, without substring matching.
        #[arg(long)]
        exact: bool,
    },
    /// Mix conversation datasets per a recipe.
    Mix {
        recipe: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Rule,
    ZeroShot,
    ImprovedSysmsg,
    TwoShotIcl,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Jsonl,
}

fn config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
        cfg.client.concurrency = j;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.replay.is_some() {
        cfg.replay.clone_from(&cli.replay);
    }
    cfg.strict |= cli.strict;
    Ok(cfg)
}

fn tags_dir(cfg: &PipelineConfig, tags: Option<PathBuf>) -> Result<PathBuf> {
    tags.or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| somkit::Error::Config("no tags directory given".into()))
}

fn run(cli: Cli) -> Result<(RunResult, bool)> {
    let mut cfg = config(&cli)?;
    let result = match cli.command {
        Command::Tag { annotations, images, out, level } => {
            cfg.annotations = annotations.or(cfg.annotations);
            cfg.images = images.or(cfg.images);
            cfg.output_dir = out.or(cfg.output_dir);
            cfg.level = level.unwrap_or(cfg.level);
            pipeline::run_tag(&cfg)?
        }
        Command::GenListing { tags, out, mode } => {
            let dir = tags_dir(&cfg, tags)?;
            let kind = match mode {
                Some(Mode::Rule) => GenKind::RuleListing,
                Some(Mode::ZeroShot) => GenKind::Listing(PromptMode::ZeroShot),
                Some(Mode::ImprovedSysmsg) => GenKind::Listing(PromptMode::ImprovedSysmsg),
                Some(Mode::TwoShotIcl) => GenKind::Listing(PromptMode::TwoShotIcl),
                None => GenKind::Listing(cfg.prompt_mode),
            };
            let client = match kind {
                GenKind::RuleListing => None,
                _ => Some(pipeline::make_client(&cfg)?),
            };
            pipeline::run_gen(&cfg, &dir, kind, &out, client.as_ref())?
        }
        Command::GenQa { tags, out } => {
            let dir = tags_dir(&cfg, tags)?;
            let client = pipeline::make_client(&cfg)?;
            pipeline::run_gen(&cfg, &dir, GenKind::Qa, &out, Some(&client))?
        }
        Command::Probe { files } => pipeline::run_probe(&files)?,
        Command::Score { pred, gold, exact } => {
            let policy = if exact {
                MatchPolicy { substring_match: false, ..cfg.match_policy.clone() }
            } else {
                cfg.match_policy.clone()
            };
            pipeline::run_score(&pred, &gold, &policy)?
        }
        Command::Mix { recipe, out, format } => {
            let format = match format {
                Format::Json => OutputFormat::JsonArray,
                Format::Jsonl => OutputFormat::Jsonl,
            };
            pipeline::run_mix(&recipe, &out, format, cfg.jobs.max(1))?
        }
    };
    Ok((result, cfg.strict))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    match run(Cli::parse()) {
        Ok((result, strict)) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&result.summary).expect("summary serializes")
            );
            let code = result.exit_code(strict);
            if code != 0 {
                eprintln!("error: {} image(s) failed", result.failures.len());
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.class().exit_code() as u8)
        }
    }
}
