//! Command-line front end.
//!
//! Settings come from an optional config file (`--config`, TOML or JSON),
//! overridden by `REFCLASS_*` environment variables, overridden by flags.
//! Exit codes: 0 on success, 2 on any error, 3 when a comparison has no
//! papers in common with the gold standard.

mod commands;
mod config;
mod tables;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::classifier::Method;
use crate::error::{Error, Result};
use crate::synthgen::SynthParams;

pub use config::{resolve_grid, ExperimentConfig, GridEntry, GridSpec};
pub use tables::Table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_EMPTY_INTERSECTION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "refclass", version, about = "Reference-based fractional subject classification")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Experiment config file (TOML, or JSON by extension).
    #[arg(long, global = true, env = "REFCLASS_CONFIG")]
    pub config: Option<PathBuf>,
    /// Output directory [default: out].
    #[arg(long, global = true, env = "REFCLASS_OUT")]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, env = "REFCLASS_THREADS")]
    pub threads: Option<usize>,
    /// `default`, a grid file, or comma-separated method labels.
    #[arg(long, global = true, env = "REFCLASS_GRID")]
    pub grid: Option<String>,
    /// Directory with papers.csv, journals.csv, edges.csv (and scheme.csv).
    #[arg(long, global = true, env = "REFCLASS_CORPUS")]
    pub corpus: Option<PathBuf>,
    #[arg(long, global = true, env = "REFCLASS_PAPERS")]
    pub papers: Option<PathBuf>,
    #[arg(long, global = true, env = "REFCLASS_JOURNALS")]
    pub journals: Option<PathBuf>,
    #[arg(long, global = true, env = "REFCLASS_EDGES")]
    pub edges: Option<PathBuf>,
    #[arg(long, global = true, env = "REFCLASS_SCHEME")]
    pub scheme: Option<PathBuf>,
    /// Gold classification to compare against.
    #[arg(long, global = true, env = "REFCLASS_GOLD")]
    pub gold: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load the corpus and write its summary and active-reference table.
    Ingest,
    /// Run the grid and write one classification per entry.
    Classify,
    /// Compute metric tables for the written classifications.
    Evaluate,
    /// Compare the written classifications with the gold standard.
    Compare,
    /// Generate a synthetic corpus into the output directory.
    Synth(SynthArgs),
    /// Classify, evaluate, and compare when a gold standard is given.
    Report,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_papers: Option<usize>,
    #[arg(long)]
    pub n_journals: Option<usize>,
    /// Use the 26-area, 285-target scheme instead of a uniform one.
    #[arg(long)]
    pub asjc_like: bool,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct Settings {
    pub papers: Option<PathBuf>,
    pub journals: Option<PathBuf>,
    pub edges: Option<PathBuf>,
    pub scheme: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub out: PathBuf,
    pub threads: usize,
    pub grid: Option<GridSpec>,
    pub synth: SynthParams,
}

impl Settings {
    pub fn resolve(args: &CommonArgs) -> Result<Settings> {
        let file = match &args.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let corpus = args.corpus.clone().or(file.corpus);
        let in_corpus = |name: &str| corpus.as_ref().map(|d| d.join(name));
        Ok(Settings {
            papers: args.papers.clone().or(file.papers).or_else(|| in_corpus("papers.csv")),
            journals: args.journals.clone().or(file.journals).or_else(|| in_corpus("journals.csv")),
            edges: args.edges.clone().or(file.edges).or_else(|| in_corpus("edges.csv")),
            scheme: args.scheme.clone().or(file.scheme).or_else(|| in_corpus("scheme.csv")),
            gold: args.gold.clone().or(file.gold),
            out: args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
            threads: args.threads.or(file.threads).unwrap_or(0),
            grid: args.grid.clone().map(GridSpec::Named).or(file.grid),
            synth: file.synth,
        })
    }

    pub fn grid(&self) -> Result<Vec<Method>> {
        resolve_grid(self.grid.as_ref())
    }

    fn required<'a>(&self, path: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
        path.as_deref().ok_or_else(|| {
            Error::Config(format!("no {what} given (use --corpus or --{what})"))
        })
    }

    pub fn classifications_dir(&self) -> PathBuf {
        self.out.join("classifications")
    }
}

/// Parses arguments and runs the command; returns the process exit code.
pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::EmptyIntersection => EXIT_EMPTY_INTERSECTION,
        _ => EXIT_ERROR,
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let settings = Settings::resolve(&cli.common)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Ingest => commands::ingest(&settings),
        Command::Classify => commands::classify(&settings).map(|_| ()),
        Command::Evaluate => commands::evaluate(&settings),
        Command::Compare => commands::compare(&settings),
        Command::Synth(args) => commands::synth(&settings, args),
        Command::Report => commands::report(&settings),
    })
}
