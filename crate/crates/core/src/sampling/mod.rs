//! Marked Poisson points, the Palm root, and edge sampling.

mod build;
mod graph;
mod text;

pub use build::{
    add_palm_origin, build_graph_celllist, build_graph_exact, percolate_bonds, potential_edges,
    sample_graph, sample_palm_vertices, sample_ppp, sample_rooted_graph, InstanceSeeds,
    PalmVertices, PotentialEdges,
};
pub use graph::{MarkedGraph, RootedGraph};
pub use text::{from_text, rooted_to_text, to_text, ParsedGraph};
