//! Peak-level suspicion analysis: baselines, evidence, scores and reports.

mod analysis;
mod baseline;
mod config;
mod features;
mod rank;
mod report;
mod score;
mod social;

#[cfg(test)]
pub(crate) mod fixture;

pub use analysis::{analyze_peak, CapSpreadComparison, LevelEntropy, PeakAnalysis};
pub use baseline::{
    compute_baselines, summarize_peak_union, Baselines, HourOfDay, PeakUnionSummary, SpanInfo,
};
pub use config::{DetectConfig, EffectiveConfig, TermValues};
pub use features::{CapSpreadBin, EntropySummary, ENTROPY_BINS};
pub use rank::{rank_correlation_report, MarketRankCorrelation, RankCell};
pub use report::{
    run_detection, Flag, InputFile, Meta, PeakEntry, StreamInfo, SuspicionReport, TOOL_NAME,
};
pub use score::{peak_evidence, score_peak, ScoredPeak};
pub use social::{
    social_financial_map, AssortativityEntry, MarketMap, SocialFinancialMap, StockImportance,
};
