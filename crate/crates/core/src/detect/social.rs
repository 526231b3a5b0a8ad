use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::DetectConfig;
use crate::cooccur::{assortativity_points, build_graph, AssortativityPoint};
use crate::error::DetectError;
use crate::ingest::{CompanyCatalog, Dataset, Market};
use crate::stats::{kde2d, median, sector_assign, KdeGrid, Sector, SectorSplits};
use crate::timeseries::PeakTweetSet;

/// One stock seen in at least one peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StockImportance {
    pub ticker: String,
    pub market: Market,
    pub capitalization: Option<f64>,
    /// Median over its peaks of the tweets mentioning it in that peak.
    pub social_importance: f64,
    pub peaks: usize,
    /// `None` when the stock cannot be placed on log axes.
    pub sector: Option<Sector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketMap {
    pub market: Market,
    pub stocks: usize,
    pub sectors: BTreeMap<Sector, usize>,
    pub kde: Option<KdeGrid>,
    pub kde_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssortativityEntry {
    /// `None` for all markets together.
    pub market: Option<Market>,
    pub transform: String,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub error: Option<String>,
    pub points: Vec<AssortativityPoint>,
    pub excluded_zero_cap: usize,
    pub excluded_isolated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocialFinancialMap {
    /// Both axes are `log10` of the raw quantity.
    pub axes: String,
    pub splits: Option<SectorSplits>,
    /// `median` or `config`.
    pub split_rule: String,
    pub stocks: Vec<StockImportance>,
    pub markets: Vec<MarketMap>,
    pub graph_nodes: usize,
    pub graph_edges: usize,
    pub assortativity: Vec<AssortativityEntry>,
}

impl SocialFinancialMap {
    pub fn stock(&self, ticker: &str) -> Option<&StockImportance> {
        self.stocks.iter().find(|s| s.ticker == ticker)
    }

    pub fn assortativity_for(&self, market: Option<Market>) -> Option<&AssortativityEntry> {
        self.assortativity.iter().find(|a| a.market == market)
    }
}

/// Per-stock social importance against capitalization, plus the
/// capitalization assortativity of the peak co-occurrence graph.
pub fn social_financial_map(
    dataset: &Dataset,
    catalog: &CompanyCatalog,
    peaks: &[PeakTweetSet],
    config: &DetectConfig,
) -> Result<SocialFinancialMap, DetectError> {
    if peaks.is_empty() {
        return Err(DetectError::NoPeaks);
    }
    let mut per_stock: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for set in peaks {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for &i in &set.tweets {
            for tag in &dataset.tweet(i).cashtags {
                *counts.entry(tag.as_str()).or_insert(0) += 1;
            }
        }
        for (t, c) in counts {
            per_stock.entry(t).or_default().push(c as f64);
        }
    }

    let mut stocks: Vec<StockImportance> = per_stock
        .iter()
        .map(|(&t, counts)| {
            let company = catalog.get(t);
            StockImportance {
                ticker: t.to_string(),
                market: company.map_or(Market::Others, |c| c.market),
                capitalization: company.map(|c| c.capitalization),
                social_importance: median(counts).expect("non-empty"),
                peaks: counts.len(),
                sector: None,
            }
        })
        .collect();

    let log_point = |s: &StockImportance| {
        s.capitalization
            .filter(|&c| c > 0.0)
            .map(|c| (c.log10(), s.social_importance.log10()))
    };
    let plotted: Vec<(f64, f64)> = stocks.iter().filter_map(log_point).collect();
    let (splits, split_rule) = match config.sector_splits {
        Some(s) => (Some(s), "config"),
        None => {
            let fin: Vec<f64> = plotted.iter().map(|p| p.0).collect();
            let soc: Vec<f64> = plotted.iter().map(|p| p.1).collect();
            let splits = median(&fin)
                .zip(median(&soc))
                .map(|(financial, social)| SectorSplits { financial, social });
            (splits, "median")
        }
    };
    if let Some(splits) = splits {
        for s in &mut stocks {
            s.sector = log_point(s).map(|(f, so)| sector_assign(f, so, splits));
        }
    }

    let mut markets = Vec::new();
    for market in Market::ALL {
        let points: Vec<(f64, f64)> = stocks
            .iter()
            .filter(|s| s.market == market)
            .filter_map(log_point)
            .collect();
        if points.is_empty() {
            continue;
        }
        let mut sectors = BTreeMap::new();
        for s in stocks.iter().filter(|s| s.market == market) {
            if let Some(sec) = s.sector {
                *sectors.entry(sec).or_insert(0) += 1;
            }
        }
        let (kde, kde_error) = match kde2d(&points, None, config.kde_grid) {
            Ok(k) => (Some(k), None),
            Err(e) => (None, Some(e.to_string())),
        };
        markets.push(MarketMap {
            market,
            stocks: points.len(),
            sectors,
            kde,
            kde_error,
        });
    }

    let mut union: Vec<usize> = peaks
        .iter()
        .flat_map(|p| p.tweets.iter().copied())
        .collect();
    union.sort_unstable();
    union.dedup();
    let graph = build_graph(union.iter().map(|&i| dataset.tweet(i)), catalog);
    let scopes = std::iter::once(None).chain(
        Market::ALL
            .into_iter()
            .filter(|m| graph.nodes.values().any(|n| n.market == *m))
            .map(Some),
    );
    let assortativity = scopes
        .map(|market| {
            let pts = assortativity_points(&graph, market);
            let (excluded_zero_cap, excluded_isolated) =
                (pts.excluded_zero_cap, pts.excluded_isolated);
            match pts.clone().fit() {
                Ok(fit) => AssortativityEntry {
                    market,
                    transform: fit.transform,
                    slope: Some(fit.slope),
                    intercept: Some(fit.intercept),
                    error: None,
                    points: fit.points,
                    excluded_zero_cap,
                    excluded_isolated,
                },
                Err(e) => AssortativityEntry {
                    market,
                    transform: crate::cooccur::ASSORTATIVITY_TRANSFORM.to_string(),
                    slope: None,
                    intercept: None,
                    error: Some(e.to_string()),
                    points: pts.points,
                    excluded_zero_cap,
                    excluded_isolated,
                },
            }
        })
        .collect();

    Ok(SocialFinancialMap {
        axes: "log10".to_string(),
        splits,
        split_rule: split_rule.to_string(),
        stocks,
        markets,
        graph_nodes: graph.node_count(),
        graph_edges: graph.edge_count(),
        assortativity,
    })
}
