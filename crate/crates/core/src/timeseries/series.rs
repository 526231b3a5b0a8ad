use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::SeriesError;
use crate::ingest::Dataset;

/// Contiguous range of UTC hours, `[start_hour, start_hour + hours)`, with
/// hours counted from the Unix epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HourSpan {
    pub start_hour: i64,
    pub hours: usize,
}

impl HourSpan {
    pub fn new(start_hour: i64, hours: usize) -> Result<Self, SeriesError> {
        if hours == 0 {
            return Err(SeriesError::EmptySpan);
        }
        Ok(HourSpan { start_hour, hours })
    }

    pub fn end_hour(&self) -> i64 {
        self.start_hour + self.hours as i64
    }

    pub fn contains(&self, hour: i64) -> bool {
        (self.start_hour..self.end_hour()).contains(&hour)
    }

    pub fn index_of(&self, hour: i64) -> Option<usize> {
        self.contains(hour)
            .then(|| (hour - self.start_hour) as usize)
    }
}

pub fn hour_to_utc(hour: i64) -> DateTime<Utc> {
    DateTime::from_timestamp(hour * 3600, 0).expect("hour within chrono range")
}

/// Hourly mention counts of one ticker, zero-filled over a span.
#[derive(Debug, Clone, PartialEq)]
pub struct StockTimeSeries {
    pub ticker: String,
    pub start_hour: i64,
    counts: Vec<u64>,
    mean: f64,
    sigma: f64,
}

impl StockTimeSeries {
    pub fn from_counts(
        ticker: impl Into<String>,
        start_hour: i64,
        counts: Vec<u64>,
    ) -> Result<Self, SeriesError> {
        if counts.is_empty() {
            return Err(SeriesError::EmptySpan);
        }
        let n = counts.len() as f64;
        let mean = counts.iter().sum::<u64>() as f64 / n;
        let var = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - mean;
                d * d
            })
            .sum::<f64>()
            / n;
        Ok(StockTimeSeries {
            ticker: ticker.into(),
            start_hour,
            counts,
            mean,
            sigma: var.sqrt(),
        })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Population standard deviation over the full span.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn span(&self) -> HourSpan {
        HourSpan {
            start_hour: self.start_hour,
            hours: self.counts.len(),
        }
    }
}

/// Dense hourly series of `ticker` over `span`. Each tweet counts once per
/// ticker; tweets outside the span are ignored.
pub fn build_hourly_series(
    dataset: &Dataset,
    ticker: &str,
    span: HourSpan,
) -> Result<StockTimeSeries, SeriesError> {
    if span.hours == 0 {
        return Err(SeriesError::EmptySpan);
    }
    let postings = dataset
        .postings(ticker)
        .ok_or_else(|| SeriesError::UnknownTicker(ticker.to_string()))?;
    let mut counts = vec![0u64; span.hours];
    for &i in postings {
        if let Some(j) = span.index_of(dataset.tweet(i).hour()) {
            counts[j] += 1;
        }
    }
    StockTimeSeries::from_counts(ticker, span.start_hour, counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{
        CompanyCatalog, CompanyRecord, IngestOptions, Market, TrbcPath, TweetRecord,
    };
    use chrono::TimeZone;

    fn dataset(times: &[(u32, u32)]) -> Dataset {
        let catalog = CompanyCatalog::from_records([CompanyRecord::new(
            "AAA",
            Market::Nyse,
            None,
            None,
            Some(1.0),
            TrbcPath(Default::default()),
        )
        .unwrap()])
        .unwrap();
        let records = times
            .iter()
            .enumerate()
            .map(|(i, &(h, m))| TweetRecord {
                id: i.to_string(),
                created_at: Utc.with_ymd_and_hms(2017, 7, 4, h, m, 0).unwrap(),
                user_id: "u".into(),
                text: String::new(),
                retweet_of: None,
                cashtags: vec!["AAA".into()],
            })
            .collect();
        Dataset::from_records(records, &catalog, IngestOptions::default())
    }

    #[test]
    fn hour_bucketing() {
        let ds = dataset(&[(10, 5), (10, 59), (11, 0)]);
        let span = ds.hour_span().unwrap();
        let s = build_hourly_series(&ds, "AAA", span).unwrap();
        assert_eq!(s.counts(), &[2, 1]);
        assert_eq!(
            hour_to_utc(s.start_hour),
            Utc.with_ymd_and_hms(2017, 7, 4, 10, 0, 0).unwrap()
        );
    }

    #[test]
    fn zero_filled_span() {
        let ds = dataset(&[(10, 5)]);
        let span = HourSpan::new(ds.hour_span().unwrap().start_hour + 100, 24).unwrap();
        let s = build_hourly_series(&ds, "AAA", span).unwrap();
        assert_eq!(s.counts(), &[0; 24]);
        assert_eq!((s.mean(), s.sigma()), (0.0, 0.0));
    }

    #[test]
    fn errors() {
        let ds = dataset(&[(10, 5)]);
        let span = ds.hour_span().unwrap();
        assert_eq!(
            build_hourly_series(&ds, "ZZZ", span).unwrap_err(),
            SeriesError::UnknownTicker("ZZZ".into())
        );
        assert_eq!(HourSpan::new(0, 0).unwrap_err(), SeriesError::EmptySpan);
    }

    #[test]
    fn moments_recomputable() {
        let s = StockTimeSeries::from_counts("A", 0, vec![0, 0, 0, 0, 10, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(s.mean(), 1.0);
        assert_eq!(s.sigma(), 3.0);
    }
}
