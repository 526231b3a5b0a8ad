use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ingest::{CompanyCatalog, Market, TweetRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeInfo {
    pub market: Market,
    /// `None` for tickers missing from the catalog.
    pub capitalization: Option<f64>,
}

/// Weighted, undirected stock co-occurrence graph. Edge keys are stored
/// with the lexicographically smaller ticker first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoOccurrenceGraph {
    pub nodes: BTreeMap<String, NodeInfo>,
    pub edges: BTreeMap<(String, String), u64>,
}

fn edge_key(a: &str, b: &str) -> (String, String) {
    if a < b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl CoOccurrenceGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    pub fn weight(&self, a: &str, b: &str) -> Option<u64> {
        self.edges.get(&edge_key(a, b)).copied()
    }

    pub fn degrees(&self) -> BTreeMap<&str, usize> {
        let mut deg: BTreeMap<&str, usize> = self.nodes.keys().map(|k| (k.as_str(), 0)).collect();
        for (a, b) in self.edges.keys() {
            *deg.entry(a).or_default() += 1;
            *deg.entry(b).or_default() += 1;
        }
        deg
    }

    pub fn degree(&self, ticker: &str) -> usize {
        self.edges
            .keys()
            .filter(|(a, b)| a == ticker || b == ticker)
            .count()
    }

    /// Sum of incident edge weights.
    pub fn strength(&self, ticker: &str) -> u64 {
        self.edges
            .iter()
            .filter(|((a, b), _)| a == ticker || b == ticker)
            .map(|(_, w)| w)
            .sum()
    }

    /// Neighbor lists with weights, for every node.
    pub fn adjacency(&self) -> BTreeMap<&str, Vec<(&str, u64)>> {
        let mut adj: BTreeMap<&str, Vec<(&str, u64)>> = self
            .nodes
            .keys()
            .map(|k| (k.as_str(), Vec::new()))
            .collect();
        for ((a, b), &w) in &self.edges {
            adj.entry(a).or_default().push((b, w));
            adj.entry(b).or_default().push((a, w));
        }
        adj
    }
}

#[derive(Default)]
struct Partial<'a> {
    nodes: BTreeSet<&'a str>,
    edges: HashMap<(&'a str, &'a str), u64>,
}

impl<'a> Partial<'a> {
    fn add(mut self, tweet: &'a TweetRecord) -> Self {
        let mut tags: Vec<&str> = tweet.cashtags.iter().map(String::as_str).collect();
        tags.sort_unstable();
        tags.dedup();
        for (i, &a) in tags.iter().enumerate() {
            self.nodes.insert(a);
            for &b in &tags[i + 1..] {
                *self.edges.entry((a, b)).or_default() += 1;
            }
        }
        self
    }

    fn merge(mut self, other: Self) -> Self {
        self.nodes.extend(other.nodes);
        for (k, w) in other.edges {
            *self.edges.entry(k).or_default() += w;
        }
        self
    }
}

/// Every tweet with `X >= 2` distinct cashtags adds 1 to each of its
/// `X choose 2` pairs. Tickers unknown to the catalog become `OTHERS` nodes
/// without capitalization.
pub fn build_graph<'a>(
    tweets: impl IntoIterator<Item = &'a TweetRecord>,
    catalog: &CompanyCatalog,
) -> CoOccurrenceGraph {
    let tweets: Vec<&TweetRecord> = tweets.into_iter().collect();
    let partial = tweets
        .par_iter()
        .fold(Partial::default, |acc, t| acc.add(t))
        .reduce(Partial::default, Partial::merge);

    let nodes = partial
        .nodes
        .into_iter()
        .map(|t| {
            let info = match catalog.get(t) {
                Some(rec) => NodeInfo {
                    market: rec.market,
                    capitalization: Some(rec.capitalization),
                },
                None => NodeInfo {
                    market: Market::Others,
                    capitalization: None,
                },
            };
            (t.to_string(), info)
        })
        .collect();
    let edges = partial
        .edges
        .into_iter()
        .map(|((a, b), w)| ((a.to_string(), b.to_string()), w))
        .collect();
    CoOccurrenceGraph { nodes, edges }
}

/// Induced subgraph on the nodes whose degree in `graph` is at least
/// `min_degree`. Degrees are not recomputed after removal.
pub fn filter_by_degree(graph: &CoOccurrenceGraph, min_degree: usize) -> CoOccurrenceGraph {
    filter_with_degrees(graph, &graph.degrees(), min_degree)
}

/// Degree filter against an externally supplied degree census, e.g. that of
/// the graph a subgraph was cut from.
pub fn filter_with_degrees(
    graph: &CoOccurrenceGraph,
    degrees: &BTreeMap<&str, usize>,
    min_degree: usize,
) -> CoOccurrenceGraph {
    let keep = |t: &str| degrees.get(t).copied().unwrap_or(0) >= min_degree;
    CoOccurrenceGraph {
        nodes: graph
            .nodes
            .iter()
            .filter(|(t, _)| keep(t))
            .map(|(t, n)| (t.clone(), n.clone()))
            .collect(),
        edges: graph
            .edges
            .iter()
            .filter(|((a, b), _)| keep(a) && keep(b))
            .map(|(k, &w)| (k.clone(), w))
            .collect(),
    }
}
