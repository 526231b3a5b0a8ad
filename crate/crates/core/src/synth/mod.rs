//! Seeded generator of labeled synthetic cashtag streams.

mod config;
mod evaluate;
mod generate;
mod truth;

pub use config::{CampaignSpec, MarketSpec, SynthConfig};
pub use evaluate::{evaluate, Confusion, Evaluation};
pub use generate::{generate, synthetic_ticker, SynthOutput, SYNTH_RNG};
pub use truth::{CampaignTruth, ExpectedPeak, GroundTruth, TweetLabel, UserLabel};
