use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::BufRead;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::catalog::{CompanyCatalog, Market};
use super::tweet::{parse_tweet_record, TweetRecord};
use crate::error::IngestError;
use crate::timeseries::HourSpan;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestOptions {
    /// Retain cashtags missing from the catalog, tagged as market OTHERS.
    pub keep_unknown: bool,
}

/// Outcome counters of one ingest run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    /// Well-formed records, kept or filtered.
    pub parsed: usize,
    pub malformed: usize,
    /// Well-formed records without any usable cashtag.
    pub filtered: usize,
    /// Digest of every well-formed record id, see [`stream_digest`].
    pub ids_digest: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub tweets: usize,
    pub retweets: usize,
    pub users: usize,
}

/// Ingested tweet stream with a per-ticker posting index.
#[derive(Debug, Clone)]
pub struct Dataset {
    tweets: Vec<TweetRecord>,
    postings: BTreeMap<String, Vec<usize>>,
    markets: BTreeMap<String, Market>,
    overall: Counters,
    per_market: BTreeMap<Market, Counters>,
    summary: IngestSummary,
}

/// SHA-256 over the sorted, newline-joined ids. Order-independent
/// fingerprint of a stream, shared by ingest and the ground truth.
pub fn stream_digest<'a>(ids: impl IntoIterator<Item = &'a str>) -> String {
    let mut ids: Vec<&str> = ids.into_iter().collect();
    ids.sort_unstable();
    let mut hasher = Sha256::new();
    for id in ids {
        hasher.update(id.as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

/// Parse a JSON-lines tweet stream and assemble the dataset. Malformed and
/// filtered records are counted, never fatal; only I/O errors propagate.
pub fn ingest<R: BufRead>(
    reader: R,
    catalog: &CompanyCatalog,
    options: IngestOptions,
) -> Result<Dataset, IngestError> {
    let lines: Vec<String> = reader.lines().collect::<Result<_, _>>()?;
    let parsed: Vec<Result<TweetRecord, IngestError>> = lines
        .par_iter()
        .filter(|l| !l.trim().is_empty())
        .map(|l| parse_tweet_record(l))
        .collect();

    let mut malformed = 0;
    let mut seen = HashSet::new();
    let mut records = Vec::with_capacity(parsed.len());
    for result in parsed {
        match result {
            Ok(rec) if seen.insert(rec.id.clone()) => records.push(rec),
            _ => malformed += 1,
        }
    }
    let mut dataset = Dataset::from_records(records, catalog, options);
    dataset.summary.malformed = malformed;
    Ok(dataset)
}

impl Dataset {
    /// Assemble a dataset from already-parsed records. Cashtags absent from
    /// the catalog are dropped (or kept as OTHERS); records left without any
    /// cashtag are filtered out.
    pub fn from_records(
        records: Vec<TweetRecord>,
        catalog: &CompanyCatalog,
        options: IngestOptions,
    ) -> Dataset {
        let parsed = records.len();
        let ids_digest = stream_digest(records.iter().map(|r| r.id.as_str()));

        let mut markets = BTreeMap::new();
        let mut tweets = Vec::with_capacity(records.len());
        for mut rec in records {
            rec.cashtags.retain(|t| {
                if let Some(company) = catalog.get(t) {
                    markets.insert(t.clone(), company.market);
                    true
                } else if options.keep_unknown {
                    markets.insert(t.clone(), Market::Others);
                    true
                } else {
                    false
                }
            });
            if !rec.cashtags.is_empty() {
                tweets.push(rec);
            }
        }
        let filtered = parsed - tweets.len();

        let mut postings: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, t) in tweets.iter().enumerate() {
            for tag in &t.cashtags {
                postings.entry(tag.clone()).or_default().push(i);
            }
        }
        for list in postings.values_mut() {
            list.sort_by_key(|&i| (tweets[i].created_at, i));
        }

        let mut users = HashSet::new();
        let mut market_users: BTreeMap<Market, HashSet<&str>> = BTreeMap::new();
        let mut overall = Counters::default();
        let mut per_market: BTreeMap<Market, Counters> = BTreeMap::new();
        for t in &tweets {
            overall.tweets += 1;
            overall.retweets += t.is_retweet() as usize;
            users.insert(t.user_id.as_str());
            let tweet_markets: BTreeSet<Market> = t.cashtags.iter().map(|c| markets[c]).collect();
            for m in tweet_markets {
                let c = per_market.entry(m).or_default();
                c.tweets += 1;
                c.retweets += t.is_retweet() as usize;
                market_users
                    .entry(m)
                    .or_default()
                    .insert(t.user_id.as_str());
            }
        }
        overall.users = users.len();
        for (m, u) in market_users {
            per_market.get_mut(&m).expect("market counted").users = u.len();
        }

        Dataset {
            tweets,
            postings,
            markets,
            overall,
            per_market,
            summary: IngestSummary {
                parsed,
                malformed: 0,
                filtered,
                ids_digest,
            },
        }
    }

    pub fn tweets(&self) -> &[TweetRecord] {
        &self.tweets
    }

    pub fn tweet(&self, index: usize) -> &TweetRecord {
        &self.tweets[index]
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    /// Indices of tweets mentioning `ticker`, ordered by timestamp.
    pub fn postings(&self, ticker: &str) -> Option<&[usize]> {
        self.postings.get(ticker).map(Vec::as_slice)
    }

    /// Every indexed ticker, sorted.
    pub fn tickers(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    pub fn market_of(&self, ticker: &str) -> Option<Market> {
        self.markets.get(ticker).copied()
    }

    pub fn counters(&self) -> &Counters {
        &self.overall
    }

    pub fn market_counters(&self) -> &BTreeMap<Market, Counters> {
        &self.per_market
    }

    pub fn ingest_summary(&self) -> &IngestSummary {
        &self.summary
    }

    pub fn retweet_fraction(&self) -> Option<f64> {
        (self.overall.tweets > 0).then(|| self.overall.retweets as f64 / self.overall.tweets as f64)
    }

    /// Smallest span of whole UTC hours covering every tweet.
    pub fn hour_span(&self) -> Option<HourSpan> {
        let first = self.tweets.iter().map(TweetRecord::hour).min()?;
        let last = self.tweets.iter().map(TweetRecord::hour).max()?;
        HourSpan::new(first, (last - first + 1) as usize).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::catalog::load_company_catalog;

    fn catalog() -> CompanyCatalog {
        load_company_catalog(
            "ticker,market,share_price,shares_outstanding,capitalization,trbc_l1,trbc_l2,trbc_l3,trbc_l4,trbc_l5\n\
             AAPL,NASDAQ,,,800,a,b,c,d,tech\n\
             XYZ,OTCMKTS,,,1,a,b,c,d,tech\n"
                .as_bytes(),
        )
        .unwrap()
    }

    fn line(id: &str, ts: &str, text: &str, rt: Option<&str>) -> String {
        let rt = rt
            .map(|r| format!(r#","retweet_of":"{r}""#))
            .unwrap_or_default();
        format!(r#"{{"id":"{id}","created_at":"{ts}","user_id":"u{id}","text":"{text}"{rt}}}"#)
    }

    #[test]
    fn counts_parsed_malformed_filtered() {
        let input = [
            line("1", "2017-07-04T13:00:00Z", "$AAPL up", None),
            "{broken".to_string(),
            line("2", "2017-07-04T13:00:00Z", "$MSFT flat", None),
        ]
        .join("\n");
        let ds = ingest(input.as_bytes(), &catalog(), IngestOptions::default()).unwrap();
        assert_eq!(ds.len(), 1);
        let s = ds.ingest_summary();
        assert_eq!((s.parsed, s.malformed, s.filtered), (2, 1, 1));
    }

    #[test]
    fn keep_unknown_tags_others() {
        let input = line("2", "2017-07-04T13:00:00Z", "$BTC moon $AAPL", None);
        let ds = ingest(
            input.as_bytes(),
            &catalog(),
            IngestOptions { keep_unknown: true },
        )
        .unwrap();
        assert_eq!(ds.market_of("BTC"), Some(Market::Others));
        assert_eq!(ds.tweet(0).cashtags, vec!["BTC", "AAPL"]);
        let dropped = ingest(input.as_bytes(), &catalog(), IngestOptions::default()).unwrap();
        assert_eq!(dropped.tweet(0).cashtags, vec!["AAPL"]);
    }

    #[test]
    fn retweets_and_duplicates() {
        let input = [
            line("1", "2017-07-04T13:00:00Z", "$AAPL up", None),
            line("2", "2017-07-04T13:05:00Z", "RT $AAPL up", Some("1")),
            line("2", "2017-07-04T13:06:00Z", "dup $AAPL", None),
            line("3", "2017-07-04T14:05:00Z", "$XYZ and $AAPL", None),
        ]
        .join("\n");
        let ds = ingest(input.as_bytes(), &catalog(), IngestOptions::default()).unwrap();
        assert_eq!(
            ds.counters(),
            &Counters {
                tweets: 3,
                retweets: 1,
                users: 3
            }
        );
        assert_eq!(ds.ingest_summary().malformed, 1);
        assert_eq!(ds.market_counters()[&Market::Otcmkts].tweets, 1);
        assert_eq!(ds.postings("AAPL").unwrap(), &[0, 1, 2]);
        assert!(ds.counters().retweets <= ds.counters().tweets);
        let span = ds.hour_span().unwrap();
        assert_eq!(span.hours, 2);
    }

    #[test]
    fn posting_index_matches_rescan() {
        let input = [
            line("3", "2017-07-04T15:00:00Z", "$XYZ", None),
            line("1", "2017-07-04T13:00:00Z", "$AAPL $XYZ", None),
            line("2", "2017-07-04T14:00:00Z", "$AAPL", None),
        ]
        .join("\n");
        let ds = ingest(input.as_bytes(), &catalog(), IngestOptions::default()).unwrap();
        for ticker in ds.tickers() {
            let rescan = ds.tweets().iter().filter(|t| t.mentions(ticker)).count();
            assert_eq!(ds.postings(ticker).unwrap().len(), rescan);
            for &i in ds.postings(ticker).unwrap() {
                assert!(ds.tweet(i).mentions(ticker));
            }
        }
        // Postings are time-ordered regardless of input order.
        let xyz: Vec<&str> = ds
            .postings("XYZ")
            .unwrap()
            .iter()
            .map(|&i| ds.tweet(i).id.as_str())
            .collect();
        assert_eq!(xyz, ["1", "3"]);
    }

    #[test]
    fn digest_is_order_independent() {
        assert_eq!(stream_digest(["a", "b"]), stream_digest(["b", "a"]));
        assert_ne!(stream_digest(["a", "b"]), stream_digest(["a"]));
    }
}
