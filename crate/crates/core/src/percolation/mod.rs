//! Cluster analysis and finite-size estimates of the percolation
//! probability.

mod dsu;

pub use dsu::DisjointSets;

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DomainShape, ModelParams, SpatialDomain};
use crate::rng::seed_derivation;
use crate::sampling::{
    potential_edges, sample_palm_vertices, InstanceSeeds, MarkedGraph, PotentialEdges, RootedGraph,
};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% for `k` successes out of `n`.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let phat = k as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Component labels of every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterReport {
    /// Labels numbered by each component's smallest vertex index.
    pub component_id: Vec<usize>,
    pub component_sizes: Vec<usize>,
    pub largest_size: usize,
    /// Present for rooted graphs.
    pub origin: Option<OriginStats>,
}

impl ClusterReport {
    pub fn component_size_of(&self, v: usize) -> usize {
        self.component_sizes[self.component_id[v]]
    }

    pub fn n_components(&self) -> usize {
        self.component_sizes.len()
    }
}

/// Statistics of the root's component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OriginStats {
    pub size: usize,
    /// Largest distance from the origin to a vertex of its component.
    pub reach: f64,
    /// True if the component winds around the torus.
    pub wraps: bool,
}

fn edge_labels(n: usize, edges: &[(usize, usize)]) -> (Vec<usize>, Vec<usize>) {
    let mut dsu = DisjointSets::new(n);
    for &(i, j) in edges {
        dsu.union(i, j);
    }
    dsu.canonical_labels()
}

pub fn connected_components(graph: &MarkedGraph) -> ClusterReport {
    let (component_id, component_sizes) = edge_labels(graph.n_vertices(), graph.edges());
    let largest_size = component_sizes.iter().copied().max().unwrap_or(0);
    ClusterReport {
        component_id,
        component_sizes,
        largest_size,
        origin: None,
    }
}

/// Components plus origin statistics.
pub fn rooted_report(g: &RootedGraph) -> ClusterReport {
    let mut r = connected_components(&g.graph);
    r.origin = Some(origin_stats(&g.graph, g.root_index));
    r
}

/// BFS over the root's component. On a torus each vertex is given an
/// unwrapped position by adding minimum-image displacements along BFS
/// edges; a second, inconsistent unwrapped position means the component
/// winds around.
fn origin_stats(graph: &MarkedGraph, root: usize) -> OriginStats {
    let dom = graph.domain();
    let n = graph.n_vertices();
    let mut seen = vec![false; n];
    let mut unwrapped: Vec<Vec<f64>> = vec![Vec::new(); n];
    let origin = &graph.vertex(root).position;
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    unwrapped[root] = origin.clone();
    let (mut size, mut reach, mut wraps) = (0usize, 0.0f64, false);
    while let Some(u) = queue.pop_front() {
        size += 1;
        reach = reach.max(dom.dist(origin, &graph.vertex(u).position));
        for &v in graph.neighbors(u) {
            let step = dom.displacement(&graph.vertex(u).position, &graph.vertex(v).position);
            let cand: Vec<f64> = unwrapped[u].iter().zip(&step).map(|(a, b)| a + b).collect();
            if !seen[v] {
                seen[v] = true;
                unwrapped[v] = cand;
                queue.push_back(v);
            } else if dom.is_torus() && !wraps {
                let off = unwrapped[v]
                    .iter()
                    .zip(&cand)
                    .any(|(a, b)| (a - b).abs() > dom.side / 2.0);
                wraps = off;
            }
        }
    }
    OriginStats { size, reach, wraps }
}

/// Origin statistics with the reach event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OriginReach {
    pub size: usize,
    pub reach: f64,
    pub reaches_r: bool,
}

fn check_radius(domain: &SpatialDomain, r: f64) -> Result<()> {
    if !(r >= 0.0) {
        return Err(Error::param("R", format!("{r} must be non-negative")));
    }
    if domain.is_torus() && r > domain.side / 2.0 {
        return Err(Error::param(
            "R",
            format!("{r} exceeds half the torus side {}", domain.side / 2.0),
        ));
    }
    Ok(())
}

/// `reaches_r` is true iff some vertex of the root's component lies at
/// distance at least `r` from the origin.
pub fn origin_cluster_stats(g: &RootedGraph, r: f64) -> Result<OriginReach> {
    check_radius(g.graph.domain(), r)?;
    let s = origin_stats(&g.graph, g.root_index);
    Ok(OriginReach {
        size: s.size,
        reach: s.reach,
        reaches_r: s.reach >= r,
    })
}

/// Box proxy: the root's component contains a vertex within `shell` of the
/// boundary in sup-norm.
pub fn origin_touches_boundary(g: &RootedGraph, shell: f64) -> bool {
    let dom = g.graph.domain();
    let edge = dom.side / 2.0 - shell;
    let report = connected_components(&g.graph);
    let c = report.component_id[g.root_index];
    g.graph.vertices().iter().enumerate().any(|(i, v)| {
        report.component_id[i] == c && v.position.iter().any(|x| x.abs() >= edge)
    })
}

/// Fraction of vertices whose component has at most `k` vertices.
pub fn small_component_fraction(graph: &MarkedGraph, k: usize) -> Result<f64> {
    if graph.is_empty() {
        return Err(Error::pre("small_component_fraction needs a nonempty graph"));
    }
    let rep = connected_components(graph);
    let small: usize = rep.component_sizes.iter().filter(|&&s| s <= k).sum();
    Ok(small as f64 / graph.n_vertices() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub successes: usize,
    pub replications: usize,
}

impl ThetaEstimate {
    fn from_counts(successes: usize, replications: usize) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, replications);
        Self {
            estimate: successes as f64 / replications as f64,
            ci_low,
            ci_high,
            successes,
            replications,
        }
    }
}

/// One Palm instance with its potential edges, reusable across `p`.
pub struct CoupledInstance {
    pub domain: SpatialDomain,
    pub seed: u64,
    root: usize,
    vertices: Vec<crate::model::Vertex>,
    potential: PotentialEdges,
    params: ModelParams,
}

impl CoupledInstance {
    pub fn sample(params: &ModelParams, domain: &SpatialDomain, seed: u64) -> Result<Self> {
        let palm = sample_palm_vertices(params, domain, seed)?;
        let potential =
            potential_edges(&palm.vertices, params, domain, InstanceSeeds::derive(seed).edges)?;
        Ok(Self {
            domain: *domain,
            seed,
            root: palm.root_index,
            vertices: palm.vertices,
            potential,
            params: params.clone(),
        })
    }

    /// The instance at retention `p`: edge iff `u <= p * phi`, with the same
    /// `u` for every `p`.
    pub fn at(&self, p: f64) -> Result<RootedGraph> {
        let params = self.params.clone().with_p(p)?;
        let graph = MarkedGraph::from_edges(
            self.domain,
            self.vertices.clone(),
            self.potential.realize(p),
            self.seed,
            params,
        )?;
        RootedGraph::new(graph, self.root)
    }
}

/// Replication seed for a given side length and replication index.
pub fn replication_seed(master: u64, side: f64, rep: u64) -> u64 {
    seed_derivation(master, &[side.to_bits(), rep])
}

/// Fraction of replications in which the root's cluster reaches distance
/// `r`, with its Wilson interval. Edges are sampled with probability
/// `p * phi` using `params.p`.
pub fn theta_estimate(
    params: &ModelParams,
    shape: DomainShape,
    side: f64,
    r: f64,
    replications: usize,
    seed: u64,
) -> Result<ThetaEstimate> {
    if replications < 1 {
        return Err(Error::param("replications", "must be at least 1"));
    }
    if !(r < side / 2.0) {
        return Err(Error::param("R", format!("{r} must be below L/2 = {}", side / 2.0)));
    }
    let domain = SpatialDomain::new(shape, side, params.d)?;
    let mut hits = 0;
    for rep in 0..replications {
        let inst = CoupledInstance::sample(params, &domain, replication_seed(seed, side, rep as u64))?;
        if origin_cluster_stats(&inst.at(params.p)?, r)?.reaches_r {
            hits += 1;
        }
    }
    Ok(ThetaEstimate::from_counts(hits, replications))
}

/// One replication at one `(p, L)`; field names match the CSV columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercolationRow {
    pub gamma: f64,
    pub delta: f64,
    pub beta: f64,
    pub p: f64,
    pub d: usize,
    pub domain: String,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub seed: u64,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub largest_cluster: usize,
    pub origin_size: usize,
    pub origin_reach: f64,
    #[serde(rename = "reaches_R")]
    pub reaches_r: bool,
    pub wraps: bool,
}

/// Reach frequency at one `(p, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSummary {
    pub p: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub replications: usize,
}

/// A `p` interval where the reach frequency at the larger side overtakes
/// the one at the smaller side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub l_small: f64,
    pub l_large: f64,
    pub p_low: f64,
    pub p_high: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<PercolationRow>,
    pub summaries: Vec<SweepSummary>,
    pub crossings: Vec<Crossing>,
}

impl SweepTable {
    pub fn summary(&self, p: f64, l: f64) -> Option<&SweepSummary> {
        self.summaries.iter().find(|s| s.p == p && s.l == l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub shape: DomainShape,
    /// Reach radius as a fraction of the side.
    pub radius_fraction: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            shape: DomainShape::Torus,
            radius_fraction: 0.25,
        }
    }
}

/// Reach frequencies over a `(p, L)` grid. Each replication samples one
/// instance per side length and realizes it at every `p` with shared edge
/// variates, so the reach indicator is monotone in `p` per replication.
pub fn pc_sweep(
    params: &ModelParams,
    p_grid: &[f64],
    l_list: &[f64],
    replications: usize,
    seed: u64,
    opts: SweepOptions,
) -> Result<SweepTable> {
    if p_grid.is_empty() {
        return Err(Error::param("p_grid", "must be nonempty"));
    }
    if l_list.is_empty() {
        return Err(Error::param("l_grid", "must be nonempty"));
    }
    if replications < 1 {
        return Err(Error::param("replications", "must be at least 1"));
    }
    for &p in p_grid {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param("p_grid", format!("{p} not in [0, 1]")));
        }
    }
    let mut rows = Vec::with_capacity(p_grid.len() * l_list.len() * replications);
    let mut hits = vec![vec![0usize; p_grid.len()]; l_list.len()];
    for (li, &side) in l_list.iter().enumerate() {
        let domain = SpatialDomain::new(opts.shape, side, params.d)?;
        let r = opts.radius_fraction * side;
        check_radius(&domain, r)?;
        for rep in 0..replications {
            let rep_seed = replication_seed(seed, side, rep as u64);
            let inst = CoupledInstance::sample(params, &domain, rep_seed)?;
            for (pi, &p) in p_grid.iter().enumerate() {
                let g = inst.at(p)?;
                let report = rooted_report(&g);
                let o = report.origin.expect("rooted report");
                let reaches = o.reach >= r;
                hits[li][pi] += reaches as usize;
                rows.push(PercolationRow {
                    gamma: params.gamma,
                    delta: params.delta,
                    beta: params.beta,
                    p,
                    d: params.d,
                    domain: opts.shape.name().to_string(),
                    l: side,
                    r,
                    seed: rep_seed,
                    n_vertices: g.graph.n_vertices(),
                    n_edges: g.graph.n_edges(),
                    largest_cluster: report.largest_size,
                    origin_size: o.size,
                    origin_reach: o.reach,
                    reaches_r: reaches,
                    wraps: o.wraps,
                });
            }
        }
    }
    // rows sorted by (p, L, replication)
    let per_l = replications * p_grid.len();
    let mut sorted = Vec::with_capacity(rows.len());
    for pi in 0..p_grid.len() {
        for li in 0..l_list.len() {
            for rep in 0..replications {
                sorted.push(rows[li * per_l + rep * p_grid.len() + pi].clone());
            }
        }
    }
    let mut summaries = Vec::new();
    for (pi, &p) in p_grid.iter().enumerate() {
        for (li, &l) in l_list.iter().enumerate() {
            let t = ThetaEstimate::from_counts(hits[li][pi], replications);
            summaries.push(SweepSummary {
                p,
                l,
                frequency: t.estimate,
                ci_low: t.ci_low,
                ci_high: t.ci_high,
                replications,
            });
        }
    }
    let crossings = crossing_windows(p_grid, l_list, &hits);
    Ok(SweepTable {
        rows: sorted,
        summaries,
        crossings,
    })
}

/// Sign changes from negative to positive of `freq(L2, p) - freq(L1, p)`
/// along increasing `p`, for each pair of consecutive side lengths.
fn crossing_windows(p_grid: &[f64], l_list: &[f64], hits: &[Vec<usize>]) -> Vec<Crossing> {
    let mut order: Vec<usize> = (0..p_grid.len()).collect();
    order.sort_by(|&a, &b| p_grid[a].total_cmp(&p_grid[b]));
    let mut ls: Vec<usize> = (0..l_list.len()).collect();
    ls.sort_by(|&a, &b| l_list[a].total_cmp(&l_list[b]));
    let mut out = Vec::new();
    for w in ls.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut last_neg: Option<usize> = None;
        for &pi in &order {
            let diff = hits[b][pi] as i64 - hits[a][pi] as i64;
            if diff < 0 {
                last_neg = Some(pi);
            } else if diff > 0 {
                if let Some(ni) = last_neg.take() {
                    out.push(Crossing {
                        l_small: l_list[a],
                        l_large: l_list[b],
                        p_low: p_grid[ni],
                        p_high: p_grid[pi],
                    });
                }
            }
        }
    }
    out
}
