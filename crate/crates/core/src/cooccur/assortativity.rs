//! Capitalization assortativity: own capitalization against the
//! edge-weighted mean capitalization of a node's neighbors, fitted by least
//! squares on log10 axes.

use serde::{Deserialize, Serialize};

use super::graph::CoOccurrenceGraph;
use crate::error::GraphError;
use crate::ingest::Market;

pub const ASSORTATIVITY_TRANSFORM: &str = "log10-log10";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssortativityPoint {
    pub ticker: String,
    pub capitalization: f64,
    pub neighbor_mean: f64,
}

impl AssortativityPoint {
    pub fn log_coords(&self) -> (f64, f64) {
        (self.capitalization.log10(), self.neighbor_mean.log10())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssortativityPoints {
    pub market: Option<Market>,
    pub points: Vec<AssortativityPoint>,
    /// Filtered nodes with zero or unknown capitalization.
    pub excluded_zero_cap: usize,
    /// Filtered nodes without any neighbor of positive capitalization.
    pub excluded_isolated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssortativityFit {
    pub market: Option<Market>,
    pub transform: String,
    pub slope: f64,
    pub intercept: f64,
    pub n_points: usize,
    pub points: Vec<AssortativityPoint>,
    pub excluded_zero_cap: usize,
    pub excluded_isolated: usize,
}

fn positive_cap(graph: &CoOccurrenceGraph, ticker: &str) -> Option<f64> {
    graph.nodes.get(ticker)?.capitalization.filter(|&c| c > 0.0)
}

/// One point per node of `market` (every node when `None`). Neighbors of any
/// market contribute, weighted by co-occurrence count; neighbors without a
/// positive capitalization are skipped.
pub fn assortativity_points(
    graph: &CoOccurrenceGraph,
    market: Option<Market>,
) -> AssortativityPoints {
    let adjacency = graph.adjacency();
    let mut out = AssortativityPoints {
        market,
        points: Vec::new(),
        excluded_zero_cap: 0,
        excluded_isolated: 0,
    };
    for (ticker, info) in &graph.nodes {
        if market.is_some_and(|m| m != info.market) {
            continue;
        }
        let Some(cap) = positive_cap(graph, ticker) else {
            out.excluded_zero_cap += 1;
            continue;
        };
        let (mut num, mut den) = (0.0, 0.0);
        for &(nb, w) in adjacency
            .get(ticker.as_str())
            .map(Vec::as_slice)
            .unwrap_or(&[])
        {
            if let Some(c) = positive_cap(graph, nb) {
                num += w as f64 * c;
                den += w as f64;
            }
        }
        if den == 0.0 {
            out.excluded_isolated += 1;
            continue;
        }
        out.points.push(AssortativityPoint {
            ticker: ticker.clone(),
            capitalization: cap,
            neighbor_mean: num / den,
        });
    }
    out
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn least_squares(xy: &[(f64, f64)]) -> Result<(f64, f64), GraphError> {
    if xy.len() < 3 {
        return Err(GraphError::TooFewPoints(xy.len()));
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(GraphError::DegenerateFit);
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

impl AssortativityPoints {
    pub fn fit(self) -> Result<AssortativityFit, GraphError> {
        let xy: Vec<(f64, f64)> = self
            .points
            .iter()
            .map(AssortativityPoint::log_coords)
            .collect();
        let (slope, intercept) = least_squares(&xy)?;
        Ok(AssortativityFit {
            market: self.market,
            transform: ASSORTATIVITY_TRANSFORM.to_string(),
            slope,
            intercept,
            n_points: self.points.len(),
            points: self.points,
            excluded_zero_cap: self.excluded_zero_cap,
            excluded_isolated: self.excluded_isolated,
        })
    }
}

pub fn capitalization_assortativity(
    graph: &CoOccurrenceGraph,
    market: Option<Market>,
) -> Result<AssortativityFit, GraphError> {
    assortativity_points(graph, market).fit()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cooccur::NodeInfo;
    use proptest::prelude::*;

    fn graph(nodes: &[(&str, f64)], edges: &[(&str, &str, u64)]) -> CoOccurrenceGraph {
        let mut g = CoOccurrenceGraph::default();
        for &(t, c) in nodes {
            g.nodes.insert(
                t.into(),
                NodeInfo {
                    market: Market::Nyse,
                    capitalization: Some(c),
                },
            );
        }
        for &(a, b, w) in edges {
            let key = if a < b {
                (a.into(), b.into())
            } else {
                (b.into(), a.into())
            };
            g.edges.insert(key, w);
        }
        g
    }

    #[test]
    fn chain_neighbor_mean() {
        let g = graph(
            &[("A", 10.0), ("B", 100.0), ("C", 1000.0)],
            &[("A", "B", 1), ("B", "C", 1)],
        );
        let pts = assortativity_points(&g, None);
        let b = pts.points.iter().find(|p| p.ticker == "B").unwrap();
        assert_eq!(b.neighbor_mean, 505.0);
        assert_eq!(pts.points.len(), 3);
    }

    #[test]
    fn two_nodes_too_few() {
        let g = graph(&[("A", 100.0), ("B", 100.0)], &[("A", "B", 3)]);
        let pts = assortativity_points(&g, None);
        assert!(pts
            .points
            .iter()
            .all(|p| p.capitalization == p.neighbor_mean));
        assert_eq!(pts.fit(), Err(GraphError::TooFewPoints(2)));
    }

    #[test]
    fn exclusions_counted() {
        let mut g = graph(
            &[("A", 0.0), ("B", 5.0), ("C", 7.0), ("D", 9.0)],
            &[("A", "B", 1)],
        );
        g.nodes.get_mut("C").unwrap().capitalization = None;
        let pts = assortativity_points(&g, None);
        assert_eq!(pts.excluded_zero_cap, 2);
        // B's only neighbor has zero cap; D has no edges.
        assert_eq!(pts.excluded_isolated, 2);
    }

    #[test]
    fn sorted_chain_is_assortative() {
        let n = 40;
        let names: Vec<String> = (0..n).map(|i| format!("S{i:02}")).collect();
        let nodes: Vec<(&str, f64)> = names
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), 10f64.powf(3.0 + 0.1 * i as f64)))
            .collect();
        let edges: Vec<(&str, &str, u64)> = (1..n)
            .map(|i| (names[i - 1].as_str(), names[i].as_str(), 1))
            .collect();
        let fit = capitalization_assortativity(&graph(&nodes, &edges), None).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.1, "{}", fit.slope);
        assert_eq!(fit.transform, ASSORTATIVITY_TRANSFORM);
    }

    #[test]
    fn degenerate_fit() {
        let g = graph(
            &[("A", 10.0), ("B", 10.0), ("C", 10.0)],
            &[("A", "B", 1), ("B", "C", 4)],
        );
        assert_eq!(
            capitalization_assortativity(&g, None).unwrap_err(),
            GraphError::DegenerateFit
        );
    }

    proptest! {
        #[test]
        fn slope_invariant_under_cap_scaling(
            caps in prop::collection::vec(1.0f64..1e6, 4..12),
            scale in 1e-3f64..1e3,
        ) {
            let names: Vec<String> = (0..caps.len()).map(|i| format!("N{i}")).collect();
            let nodes: Vec<(&str, f64)> = names.iter().map(String::as_str).zip(caps.iter().copied()).collect();
            let scaled: Vec<(&str, f64)> = nodes.iter().map(|&(t, c)| (t, c * scale)).collect();
            let edges: Vec<(&str, &str, u64)> = (0..caps.len())
                .flat_map(|i| (i + 1..caps.len()).filter(move |j| (i + j) % 3 != 0).map(move |j| (i, j)))
                .map(|(i, j)| (names[i].as_str(), names[j].as_str(), (i * j % 5 + 1) as u64))
                .collect();
            let a = capitalization_assortativity(&graph(&nodes, &edges), None);
            let b = capitalization_assortativity(&graph(&scaled, &edges), None);
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!((a.slope - b.slope).abs() < 1e-6 * (1.0 + a.slope.abs()));
            }
        }
    }
}
