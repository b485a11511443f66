//! `presslens`: the pipeline command line.
//!
//! Exit status is 0 on success, 1 on invalid input or configuration, and 2 on I/O failure.

mod config;
mod output;
mod stages;

use std::fmt;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Validation failure raised by the command line itself.
#[derive(Debug)]
pub struct Invalid(pub String);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

#[derive(Parser)]
#[command(
    name = "presslens",
    version,
    about = "Collective identity and sentiment analysis over annotated newspaper corpora"
)]
struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` from the configuration.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CorpusArg {
    /// Corpus JSONL; overrides `corpus` from the configuration.
    #[arg(long)]
    corpus: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct AnalysisArgs {
    #[command(flatten)]
    corpus: CorpusArg,
    /// Mentions JSONL [default: <out>/mentions.jsonl].
    #[arg(long)]
    mentions: Option<PathBuf>,
    /// Predictions JSONL [default: <out>/predictions.jsonl].
    #[arg(long)]
    predictions: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct ScopeArgs {
    #[arg(long)]
    newspaper: Option<String>,
    /// Theme allow-list, comma-separated.
    #[arg(long, value_delimiter = ',')]
    themes: Option<Vec<String>>,
    #[arg(long)]
    min_weight: Option<u64>,
    /// First issue date, YYYY-MM-DD.
    #[arg(long)]
    from: Option<String>,
    /// Last issue date, YYYY-MM-DD.
    #[arg(long)]
    to: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendChoice {
    Mock,
    Http,
}

#[derive(Subcommand)]
enum Command {
    /// Token, paragraph and issue counts per newspaper.
    Stats(CorpusArg),
    /// Frequent lemmas with identity-adjective suffixes, for lexicon curation.
    LexiconCandidates {
        #[command(flatten)]
        corpus: CorpusArg,
        /// Count lemmas in this newspaper only.
        #[arg(long)]
        newspaper: Option<String>,
        #[arg(long)]
        min_freq: Option<u64>,
    },
    /// Identity mentions with their tagged context windows.
    Extract {
        #[command(flatten)]
        corpus: CorpusArg,
        /// Lexicon TSV; overrides `lexicon` from the configuration.
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Stratified annotation sample as a TSV sheet.
    Sample {
        #[arg(long)]
        mentions: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Targeted sentiment for every mention.
    Classify {
        #[arg(long)]
        mentions: Option<PathBuf>,
        /// Overrides `backend.kind` from the configuration.
        #[arg(long, value_enum)]
        backend: Option<BackendChoice>,
        /// Classify only the mention ids in the first column of this file.
        #[arg(long)]
        ids: Option<PathBuf>,
    },
    /// Scores predictions against a filled annotation sheet.
    Evaluate {
        /// Gold TSV; overrides `gold` from the configuration.
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
    /// Sentiment profiles per identity and newspaper, and theme distribution.
    Aggregate(AnalysisArgs),
    /// Co-occurrence graph as JSON and GraphML.
    Graph {
        #[command(flatten)]
        inputs: AnalysisArgs,
        #[command(flatten)]
        scope: ScopeArgs,
        /// Output file stem.
        #[arg(long, default_value = "graph")]
        name: String,
    },
    /// Compares two exported graphs.
    Diff { a: PathBuf, b: PathBuf },
    /// Serves the read-only HTTP API over an output directory.
    Serve {
        /// Directory holding mentions.jsonl and predictions.jsonl [default: <out>].
        #[arg(long)]
        bundle: Option<PathBuf>,
        #[command(flatten)]
        corpus: CorpusArg,
        #[arg(long, default_value = "127.0.0.1:8420")]
        bind: SocketAddr,
        /// Allowed browser origin; any origin when unset.
        #[arg(long)]
        cors_origin: Option<String>,
    },
    /// Tables behind the composition and ranking figures.
    PlotData(AnalysisArgs),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Invalid>() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<presslens_core::Error>() {
            return if e.is_io() { 2 } else { 1 };
        }
        if let Some(e) = cause.downcast_ref::<presslens_server::ServerError>() {
            return if e.is_io() { 2 } else { 1 };
        }
        if cause.is::<std::io::Error>() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match stages::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("presslens: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
