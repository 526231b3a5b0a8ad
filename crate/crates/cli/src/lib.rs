//! `radar`: batch pipeline from raw cashtag streams to suspicion reports.
//!
//! Exit codes: 0 success, 1 input or usage error, 2 internal invariant
//! violation.

mod commands;
mod export;
mod io;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use radar_core::{DetectError, SeriesError};

pub use export::export_plot_data;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl From<DetectError> for CliError {
    fn from(e: DetectError) -> Self {
        match e {
            DetectError::Invariant(_)
            | DetectError::MissingBaseline(_)
            | DetectError::Series(SeriesError::StalePeak { .. }) => {
                CliError::Internal(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "radar",
    version,
    about = "Detect cashtag piggybacking campaigns in stock microblog streams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct StreamArgs {
    /// Tweet stream, one JSON object per line.
    #[arg(long)]
    tweets: PathBuf,
    /// Company catalog CSV.
    #[arg(long)]
    companies: PathBuf,
    /// Keep cashtags missing from the catalog, under market OTHERS.
    #[arg(long)]
    keep_unknown: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a stream and report record counts.
    Ingest {
        #[command(flatten)]
        stream: StreamArgs,
        /// Write the ingest summary here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Detect hourly volume peaks.
    Peaks {
        #[command(flatten)]
        stream: StreamArgs,
        /// Standard deviations above the mean a peak must exceed.
        #[arg(long, default_value_t = 10.0)]
        k: f64,
        /// Peak list JSON.
        #[arg(long)]
        out: PathBuf,
        /// Also write the peak count for K = 1..=20 to this CSV.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Build the weighted co-occurrence graph.
    Graph {
        #[command(flatten)]
        stream: StreamArgs,
        /// Restrict to the tweets of peaks from `radar peaks`.
        #[arg(long)]
        peaks: Option<PathBuf>,
        /// Drop nodes with fewer neighbours in the full graph.
        #[arg(long, default_value_t = 0)]
        min_degree: usize,
        /// Edge list; nodes go to `<stem>.nodes.csv`, metadata to `<stem>.meta.json`.
        #[arg(long)]
        out: PathBuf,
        /// Assortativity points CSV; the fits go to `<stem>.fit.csv`.
        #[arg(long)]
        assortativity: Option<PathBuf>,
    },
    /// Score every peak and write the suspicion report.
    Detect {
        #[command(flatten)]
        stream: StreamArgs,
        /// Overrides `k` from the config file.
        #[arg(long)]
        k: Option<f64>,
        /// Seed for the bootstrap; required.
        #[arg(long)]
        seed: Option<u64>,
        /// Detector TOML; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Hour offset for the hourly profile; overrides the config.
        #[arg(long, allow_hyphen_values = true)]
        tz_offset: Option<i32>,
        /// Suspicion report JSON.
        #[arg(long)]
        out: PathBuf,
        /// Also export plot CSVs into this directory.
        #[arg(long)]
        plots: Option<PathBuf>,
    },
    /// Generate a labeled synthetic stream.
    Synth {
        /// Generator TOML; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed for every random draw; required.
        #[arg(long)]
        seed: Option<u64>,
        /// Tweet stream JSONL.
        #[arg(long)]
        out_tweets: PathBuf,
        /// Company catalog CSV.
        #[arg(long)]
        out_companies: PathBuf,
        /// Ground-truth labels JSON.
        #[arg(long)]
        out_truth: PathBuf,
    },
    /// Compare a report's flags with synthetic ground truth.
    Evaluate {
        /// Report from `radar detect`.
        #[arg(long)]
        report: PathBuf,
        /// Ground truth from `radar synth` for the same stream.
        #[arg(long)]
        truth: PathBuf,
        /// Write the evaluation here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-market composition table.
    Summary {
        #[command(flatten)]
        stream: StreamArgs,
        /// Also write the table as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Write plot-ready CSVs from an existing report.
    Export {
        /// Report from `radar detect`.
        #[arg(long)]
        report: PathBuf,
        /// Existing directory for the CSVs.
        #[arg(long)]
        out_dir: PathBuf,
    },
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("radar: {e}");
            e.exit_code()
        }
    }
}
