//! Error types, one enum per subsystem plus a crate-wide wrapper.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed record: {0}")]
    MalformedRecord(String),
    #[error("duplicate ticker {0}")]
    DuplicateTicker(String),
    #[error("row {row}: ticker {ticker} has neither a capitalization nor price and shares")]
    MissingCapitalization { row: usize, ticker: String },
    #[error("row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("ticker {0} does not appear in the dataset")]
    UnknownTicker(String),
    #[error("hour span is empty")]
    EmptySpan,
    #[error("K must be positive and finite, got {0}")]
    NonPositiveK(f64),
    #[error("peak {ticker}@{hour} is stale: series volume {expected}, dataset holds {found}")]
    StalePeak {
        ticker: String,
        hour: i64,
        expected: u64,
        found: u64,
    },
}

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("class vector is empty")]
    EmptyVector,
    #[error("sample is empty")]
    EmptySample,
    #[error("list is empty")]
    EmptyList,
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("group size {x} is invalid for a population of {population}")]
    GroupTooLarge { x: usize, population: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("zero variance: correlation undefined")]
    ZeroVariance,
    #[error("degenerate point set")]
    DegeneratePoints,
    #[error("invalid bandwidth ({0}, {1})")]
    BadBandwidth(f64, f64),
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("need at least 3 points for a fit, got {0}")]
    TooFewPoints(usize),
    #[error("fit is degenerate: all x coordinates are equal")]
    DegenerateFit,
}

#[derive(Debug, Error)]
pub enum DetectError {
    #[error("missing baseline: {0}")]
    MissingBaseline(&'static str),
    #[error("bad weights: {0}")]
    BadWeights(String),
    #[error("invalid detector config: {0}")]
    BadConfig(String),
    #[error("no peaks to analyze")]
    NoPeaks,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("report invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid config at `{path}`: {reason}")]
    ConfigInvalid { path: String, reason: String },
    #[error("report and ground truth describe different streams ({0})")]
    StreamMismatch(String),
}

impl SynthError {
    pub(crate) fn invalid(path: impl Into<String>, reason: impl Into<String>) -> Self {
        SynthError::ConfigInvalid {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
