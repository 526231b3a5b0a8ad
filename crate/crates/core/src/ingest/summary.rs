//! Per-market dataset composition: companies, capitalization, users, tweets
//! and retweet share.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::catalog::{CompanyCatalog, Market};
use super::dataset::Dataset;
use crate::stats::median;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketRow {
    pub market: Option<Market>,
    pub companies: usize,
    pub median_cap: Option<f64>,
    pub total_cap: f64,
    pub users: usize,
    pub tweets: usize,
    pub retweets: usize,
    pub retweet_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub markets: Vec<MarketRow>,
    /// Distinct users, tweets and retweets over the whole stream.
    pub total: MarketRow,
}

pub fn summarize(dataset: &Dataset, catalog: &CompanyCatalog) -> DatasetSummary {
    let pct = |rt: usize, tw: usize| (tw > 0).then(|| 100.0 * rt as f64 / tw as f64);
    let mut markets = Vec::new();
    for market in Market::ALL {
        let caps: Vec<f64> = catalog
            .market_tickers(market)
            .iter()
            .filter_map(|t| catalog.get(t))
            .map(|c| c.capitalization)
            .collect();
        let counters = dataset
            .market_counters()
            .get(&market)
            .cloned()
            .unwrap_or_default();
        if caps.is_empty() && counters.tweets == 0 {
            continue;
        }
        markets.push(MarketRow {
            market: Some(market),
            companies: caps.len(),
            median_cap: median(&caps),
            total_cap: caps.iter().sum(),
            users: counters.users,
            tweets: counters.tweets,
            retweets: counters.retweets,
            retweet_pct: pct(counters.retweets, counters.tweets),
        });
    }
    let all_caps = catalog.capitalizations();
    let c = dataset.counters();
    DatasetSummary {
        markets,
        total: MarketRow {
            market: None,
            companies: catalog.len(),
            median_cap: median(&all_caps),
            total_cap: all_caps.iter().sum(),
            users: c.users,
            tweets: c.tweets,
            retweets: c.retweets,
            retweet_pct: pct(c.retweets, c.tweets),
        },
    }
}

impl fmt::Display for DatasetSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<10} {:>9} {:>16} {:>12} {:>9} {:>10} {:>18}",
            "market",
            "companies",
            "median cap ($)",
            "total ($B)",
            "users",
            "tweets",
            "retweets (%)"
        )?;
        for row in self.markets.iter().chain(std::iter::once(&self.total)) {
            let name = row.market.map_or("total", Market::as_str);
            let median = row
                .median_cap
                .map_or("-".to_string(), |m| format!("{m:.0}"));
            let pct = row
                .retweet_pct
                .map_or("-".to_string(), |p| format!("{p:.0}%"));
            writeln!(
                f,
                "{:<10} {:>9} {:>16} {:>12.3} {:>9} {:>10} {:>18}",
                name,
                row.companies,
                median,
                row.total_cap / 1e9,
                row.users,
                row.tweets,
                format!("{} ({})", row.retweets, pct)
            )?;
        }
        Ok(())
    }
}
