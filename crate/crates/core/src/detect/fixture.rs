//! Small hand-built streams shared by the unit tests of this module.

use chrono::{TimeZone, Utc};

use super::config::DetectConfig;
use crate::ingest::{
    CompanyCatalog, CompanyRecord, Dataset, IngestOptions, Market, TrbcPath, TweetRecord,
};

pub fn company(ticker: &str, market: Market, cap: f64, sector: &str) -> CompanyRecord {
    let path = TrbcPath(std::array::from_fn(|i| {
        if i == 4 {
            sector.to_string()
        } else {
            format!("{ticker}{i}")
        }
    }));
    CompanyRecord::new(ticker, market, None, None, Some(cap), path).unwrap()
}

pub fn tweet(id: usize, hour: i64, tags: &[&str], retweet: bool) -> TweetRecord {
    TweetRecord {
        id: format!("t{id:05}"),
        created_at: Utc.with_ymd_and_hms(2017, 5, 1, 0, 0, 0).unwrap()
            + chrono::Duration::seconds(hour * 3600 + id as i64 % 3600),
        user_id: format!("u{}", id % 7),
        text: String::new(),
        retweet_of: retweet.then(|| "t00000".to_string()),
        cashtags: tags.iter().map(|s| s.to_string()).collect(),
    }
}

pub fn catalog() -> CompanyCatalog {
    CompanyCatalog::from_records([
        company("AAA", Market::Nasdaq, 1e9, "tech"),
        company("BBB", Market::Nasdaq, 4e9, "tech"),
        company("CCC", Market::Nyse, 2e10, "energy"),
        company("PNY", Market::Otcmkts, 1e6, "mining"),
        company("QNY", Market::Otcmkts, 2e6, "health"),
    ])
    .unwrap()
}

/// One tweet per hour on AAA for 60 hours, BBB every other hour, and a
/// 12-tweet burst on AAA at hour 30 made of `burst`.
pub fn dataset(burst: impl Fn(usize) -> TweetRecord) -> Dataset {
    let mut records = Vec::new();
    for h in 0..60 {
        records.push(tweet(records.len(), h, &["AAA"], false));
        if h % 2 == 0 {
            records.push(tweet(records.len(), h, &["BBB", "CCC"], h % 4 == 0));
        }
    }
    let base = records.len();
    records.extend((0..12).map(|i| burst(base + i)));
    records.sort_by_key(|t| t.created_at);
    Dataset::from_records(records, &catalog(), IngestOptions::default())
}

pub fn config() -> DetectConfig {
    DetectConfig {
        k: 3.0,
        bootstrap_samples: 200,
        bootstrap_max_x: 4,
        k_grid: vec![1.0, 3.0, 10.0],
        kde_grid: 16,
        ..DetectConfig::default()
    }
}
