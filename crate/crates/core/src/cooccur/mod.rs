//! Stock co-occurrence graphs and capitalization assortativity.

mod assortativity;
mod graph;

pub use assortativity::{
    assortativity_points, capitalization_assortativity, least_squares, AssortativityFit,
    AssortativityPoint, AssortativityPoints, ASSORTATIVITY_TRANSFORM,
};
pub use graph::{build_graph, filter_by_degree, filter_with_degrees, CoOccurrenceGraph, NodeInfo};
