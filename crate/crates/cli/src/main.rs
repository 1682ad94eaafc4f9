//! `advqa`: one subcommand per pipeline stage.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage error, 3 missing input
//! file, 4 input failed validation.
//!
//! All offsets in corpora are Unicode code points (as in SQuAD files). To turn
//! an `answer_start` into a byte offset for a UTF-8 buffer, walk the context's
//! characters, e.g. `context.char_indices().nth(answer_start)` in Rust or
//! `len(context[:answer_start].encode())` in Python.

mod commands;
mod config;
mod logger;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::LevelFilter;

use advqa_core::{FakeAnswerMode, PlacementStrategy, SkipPolicy};

#[derive(Debug, Parser)]
#[command(name = "advqa", version, about = "Adversarial data generation and evaluation for SQuAD-style corpora")]
pub struct Cli {
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "info")]
    pub log_level: LevelFilter,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Default)]
pub struct ResourceArgs {
    /// Lexicon TSV (`lemma<TAB>synonyms<TAB>antonyms`).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Person gazetteer, one name per line.
    #[arg(long)]
    pub persons: Option<PathBuf>,
    /// Location gazetteer, one name per line.
    #[arg(long)]
    pub locations: Option<PathBuf>,
    /// Irregular verb table (`base<TAB>past<TAB>participle`).
    #[arg(long)]
    pub irregular_verbs: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FakeArg {
    Fixed,
    Dynamic,
}

impl From<FakeArg> for FakeAnswerMode {
    fn from(f: FakeArg) -> Self {
        match f {
            FakeArg::Fixed => FakeAnswerMode::Fixed,
            FakeArg::Dynamic => FakeAnswerMode::Dynamic,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SkipArg {
    Skip,
    Fallback,
}

impl From<SkipArg> for SkipPolicy {
    fn from(s: SkipArg) -> Self {
        match s {
            SkipArg::Skip => SkipPolicy::SkipAndLog,
            SkipArg::Fallback => SkipPolicy::FallbackTemplate,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SubjectArg {
    Answer,
    Distractor,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate adversarial variants of every question.
    Generate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Write distractor records and skips as JSON lines.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Corpus whose answers form the dynamic fake-answer pool (default: input).
        #[arg(long)]
        pool: Option<PathBuf>,
        /// append | prepend | middle | random | fixed:<k>
        #[arg(long)]
        place: Option<PlacementStrategy>,
        #[arg(long, value_enum)]
        fake: Option<FakeArg>,
        /// JSON table of fixed fake answers by type.
        #[arg(long)]
        fake_table: Option<PathBuf>,
        #[arg(long)]
        variants: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        skip_policy: Option<SkipArg>,
        /// Keep variants whose question admits no perturbation.
        #[arg(long)]
        keep_unperturbed: bool,
        #[command(flatten)]
        resources: ResourceArgs,
    },
    /// Mix adversarial questions into a training corpus.
    Mix {
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        adversarial: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Share of adversarial questions in the output (default 0.2).
        #[arg(long)]
        adv_fraction: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sentence-position distributions and suspicion scores.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "distractor")]
        subject: SubjectArg,
        /// CSV with columns n,a,p_x,p_y,p_sa.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// JSON summary with uniformity scores per strategy.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Largest paragraph length in the aggregate (default 7).
        #[arg(long)]
        n_max: Option<usize>,
        /// Use marginal rather than per-length tables in the CSV.
        #[arg(long)]
        marginal: bool,
    },
    /// Synonym/antonym indicator features as a sidecar file.
    Annotate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        resources: ResourceArgs,
    },
    /// Score predictions, optionally as worst case over variant sets.
    Evaluate {
        /// Corpus to score; repeat once per prediction file in worst-case mode
        /// (a single corpus is reused for every file).
        #[arg(long, required = true)]
        data: Vec<PathBuf>,
        /// Un-attacked corpus defining the base questions (worst-case mode).
        #[arg(long)]
        base: Option<PathBuf>,
        #[arg(long, conflicts_with = "worst_case")]
        predictions: Option<PathBuf>,
        #[arg(long, num_args = 1..)]
        worst_case: Vec<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Lexical-overlap baseline predictions.
    Baseline {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Validate a corpus and print findings as JSON lines.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    logger::init(cli.log_level);
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::error!("cannot configure thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.code())
        }
    }
}
