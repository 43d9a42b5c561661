use crate::error::{Error, Result};
use crate::model::{ModelParams, SpatialDomain, Vertex};

/// An immutable marked graph: vertices plus a sorted, duplicate-free edge
/// list with a compressed adjacency index.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedGraph {
    domain: SpatialDomain,
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    adj: Vec<usize>,
    rng_seed: u64,
    params: ModelParams,
}

impl MarkedGraph {
    /// Builds a graph from an arbitrary edge list. Pairs are canonicalized
    /// to `i < j`; self-loops, duplicates and dangling indices are rejected.
    pub fn from_edges(
        domain: SpatialDomain,
        vertices: Vec<Vertex>,
        mut edges: Vec<(usize, usize)>,
        rng_seed: u64,
        params: ModelParams,
    ) -> Result<Self> {
        let n = vertices.len();
        for v in &vertices {
            if !(v.mark > 0.0 && v.mark <= 1.0) {
                return Err(Error::malformed(format!("mark {} outside (0, 1]", v.mark)));
            }
            if v.position.len() != domain.dim {
                return Err(Error::malformed("vertex dimension differs from the domain"));
            }
        }
        for e in edges.iter_mut() {
            if e.0 == e.1 {
                return Err(Error::malformed(format!("self-loop at {}", e.0)));
            }
            if e.0.max(e.1) >= n {
                return Err(Error::malformed(format!("edge {:?} references a missing vertex", e)));
            }
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::malformed("duplicate edge"));
        }
        Ok(Self::from_sorted_unchecked(domain, vertices, edges, rng_seed, params))
    }

    /// `edges` must already be canonical and sorted.
    pub(crate) fn from_sorted_unchecked(
        domain: SpatialDomain,
        vertices: Vec<Vertex>,
        edges: Vec<(usize, usize)>,
        rng_seed: u64,
        params: ModelParams,
    ) -> Self {
        let n = vertices.len();
        let mut deg = vec![0usize; n + 1];
        for &(i, j) in &edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + deg[i];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![0usize; 2 * edges.len()];
        for &(i, j) in &edges {
            adj[fill[i]] = j;
            fill[i] += 1;
            adj[fill[j]] = i;
            fill[j] += 1;
        }
        for i in 0..n {
            adj[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        Self {
            domain,
            vertices,
            edges,
            offsets,
            adj,
            rng_seed,
            params,
        }
    }

    pub fn domain(&self) -> &SpatialDomain {
        &self.domain
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Vertex {
        &self.vertices[i]
    }

    /// Canonical `(i, j)` pairs with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n_vertices()).map(|i| self.degree(i)).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n_vertices() && self.neighbors(i).binary_search(&j).is_ok()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.domain
            .dist(&self.vertices[i].position, &self.vertices[j].position)
    }

    /// Same vertices, a subset of the edges.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, usize) -> bool) -> MarkedGraph {
        let edges = self.edges.iter().copied().filter(|&(i, j)| keep(i, j)).collect();
        Self::from_sorted_unchecked(
            self.domain,
            self.vertices.clone(),
            edges,
            self.rng_seed,
            self.params.clone(),
        )
    }
}

/// A graph with a distinguished Palm vertex at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedGraph {
    pub graph: MarkedGraph,
    pub root_index: usize,
}

impl RootedGraph {
    pub fn new(graph: MarkedGraph, root_index: usize) -> Result<Self> {
        if root_index >= graph.n_vertices() {
            return Err(Error::malformed("root index out of range"));
        }
        if graph.vertex(root_index).position.iter().any(|&c| c != 0.0) {
            return Err(Error::malformed("root vertex is not at the origin"));
        }
        Ok(Self { graph, root_index })
    }
}
