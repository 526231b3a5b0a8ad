//! Detection of cashtag piggybacking campaigns in stock microblog streams.

pub mod cooccur;
pub mod detect;
pub mod error;
pub mod ingest;
pub mod stats;
pub mod synth;
pub mod timeseries;

pub use error::{DetectError, GraphError, IngestError, SeriesError, StatsError, SynthError};
