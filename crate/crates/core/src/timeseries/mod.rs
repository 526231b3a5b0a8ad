//! Hourly mention series and volume-peak detection.

mod peaks;
mod series;

pub use peaks::{
    collect_peak_tweets, detect_all_peaks, detect_peaks, min_peak_volume, peak_count_curve, KCount,
    Peak, PeakTweetSet,
};
pub use series::{build_hourly_series, hour_to_utc, HourSpan, StockTimeSeries};

/// Default number of standard deviations for peak detection.
pub const DEFAULT_K: f64 = 10.0;
