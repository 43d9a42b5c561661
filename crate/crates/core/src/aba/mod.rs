//! Age-based spatial preferential attachment on the unit torus.
//!
//! Vertices arrive after independent standard exponential waiting times at
//! uniform positions of the torus of volume one. The vertex born at time `t`
//! at `x` links to each older `(y, s)` with probability
//! `rho(t d(x, y)^d / (beta (t/s)^gamma))`. The decision for the pair of
//! arrivals `i < j` is the counter-based variate `U(i, j)`, so the graph at
//! time `t` is exactly the prefix of a longer run.

mod tail;

pub use tail::{degree_tail_fit, TailFit, MIN_TAIL_VERTICES};

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{pow_d_from_sq, FastProfile, KernelKind, ModelParams, SpatialDomain, Vertex};
use crate::percolation::connected_components;
use crate::rng::{seed_derivation, stream, PairVariates};
use crate::sampling::{percolate_bonds, MarkedGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arrival {
    /// Position on `(-1/2, 1/2]^d`.
    pub position: Vec<f64>,
    pub birth: f64,
}

/// Edge between arrival indices `older < younger`, created at the younger
/// vertex's birth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbaEdge {
    pub older: usize,
    pub younger: usize,
    pub created: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowingGraph {
    params: ModelParams,
    arrivals: Vec<Arrival>,
    /// Sorted by `(younger, older)`.
    edges: Vec<AbaEdge>,
    time: f64,
    seed: u64,
}

fn unit_torus_dist_pow_d(a: &[f64], b: &[f64]) -> f64 {
    let mut sq = 0.0;
    for (x, y) in a.iter().zip(b) {
        let mut dx = x - y;
        dx -= dx.round();
        sq += dx * dx;
    }
    pow_d_from_sq(sq, a.len())
}

/// Link probability for a newborn `(x, t)` and an older `(y, s)` on the unit torus.
pub fn aba_connection_probability(
    x: &[f64],
    t: f64,
    y: &[f64],
    s: f64,
    params: &ModelParams,
) -> Result<f64> {
    if !(s > 0.0 && s <= t) {
        return Err(Error::pre(format!("birth times s = {s}, t = {t} need 0 < s <= t")));
    }
    if x.len() != params.d || y.len() != params.d {
        return Err(Error::pre("position dimension differs from d"));
    }
    let arg = t * unit_torus_dist_pow_d(x, y) / (params.beta * (t / s).powf(params.gamma));
    Ok(FastProfile::new(params.profile, params).eval(arg))
}

impl GrowingGraph {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn arrivals(&self) -> &[Arrival] {
        &self.arrivals
    }

    pub fn edges(&self) -> &[AbaEdge] {
        &self.edges
    }

    /// Current time.
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_vertices(&self) -> usize {
        self.arrivals.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of vertices born by time `t`.
    pub fn count_at(&self, t: f64) -> usize {
        self.arrivals.partition_point(|a| a.birth <= t)
    }

    /// The graph as it was at time `t <= self.time()`.
    pub fn snapshot(&self, t: f64) -> Result<GrowingGraph> {
        if !(t >= 0.0 && t <= self.time) {
            return Err(Error::pre(format!("snapshot time {t} outside [0, {}]", self.time)));
        }
        let n = self.count_at(t);
        let m = self.edges.partition_point(|e| e.younger < n);
        Ok(GrowingGraph {
            params: self.params.clone(),
            arrivals: self.arrivals[..n].to_vec(),
            edges: self.edges[..m].to_vec(),
            time: t,
            seed: self.seed,
        })
    }
}

/// Runs the growth process up to `t_end`.
pub fn grow_aba(t_end: f64, params: &ModelParams, seed: u64) -> Result<GrowingGraph> {
    params.validate()?;
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::param("t_end", format!("{t_end} must be finite and non-negative")));
    }
    let d = params.d;
    let mut rng = stream(seed_derivation(seed, &[1]));
    let variates = PairVariates::new(seed_derivation(seed, &[3]));
    let rho = FastProfile::new(params.profile, params);
    let (gamma, inv_beta) = (params.gamma, 1.0 / params.beta);

    let mut arrivals: Vec<Arrival> = Vec::new();
    let mut s_gamma: Vec<f64> = Vec::new();
    let mut edges = Vec::new();
    let mut t = 0.0;
    loop {
        let wait: f64 = Exp1.sample(&mut rng);
        t += wait;
        if t > t_end {
            break;
        }
        let x: Vec<f64> = (0..d).map(|_| 0.5 - rng.gen::<f64>()).collect();
        let j = arrivals.len();
        // t d^d / (beta (t/s)^gamma) = t^{1-gamma} s^gamma d^d / beta
        let scale = t.powf(1.0 - gamma) * inv_beta;
        let row = |i: usize| variates.uniform(i as u64, j as u64);
        for (i, a) in arrivals.iter().enumerate() {
            let prob = rho.eval(scale * s_gamma[i] * unit_torus_dist_pow_d(&x, &a.position));
            if prob > 0.0 && row(i) <= prob {
                edges.push(AbaEdge {
                    older: i,
                    younger: j,
                    created: t,
                });
            }
        }
        s_gamma.push(t.powf(gamma));
        arrivals.push(Arrival { position: x, birth: t });
    }
    Ok(GrowingGraph {
        params: params.clone(),
        arrivals,
        edges,
        time: t_end,
        seed,
    })
}

/// `h_t(x, s) = (t^{1/d} x, s / t)`: the graph on the torus of volume `t`
/// with marks in `(0, 1]` and the edges unchanged. The attached parameters
/// use the preferential attachment kernel, under which the stationary rule
/// `rho(g(s/t, s'/t) d_t^d)` reproduces the growth probabilities.
pub fn rescale_map(graph: &GrowingGraph, t: f64) -> Result<MarkedGraph> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("{t} must be positive")));
    }
    if let Some(a) = graph.arrivals.last() {
        if a.birth > t {
            return Err(Error::pre(format!("birth time {} exceeds t = {t}", a.birth)));
        }
    }
    let d = graph.params.d;
    let domain = SpatialDomain::torus_with_volume(t, d)?;
    let k = t.powf(1.0 / d as f64);
    let vertices = graph
        .arrivals
        .iter()
        .map(|a| Vertex {
            position: a.position.iter().map(|c| c * k).collect(),
            mark: a.birth / t,
        })
        .collect();
    let edges = graph.edges.iter().map(|e| (e.older, e.younger)).collect();
    let params = graph.params.clone().with_kernel(KernelKind::Pa);
    MarkedGraph::from_edges(domain, vertices, edges, graph.seed, params)
}

/// One `(t, replication)` of [`giant_fraction_trajectory`], in the CSV layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbaRow {
    pub gamma: f64,
    pub delta: f64,
    pub beta: f64,
    pub p: f64,
    pub d: usize,
    pub t: f64,
    pub seed: u64,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub largest_fraction: f64,
    pub oldest_component_fraction: f64,
    pub xi_1: f64,
    pub xi_10: f64,
    pub xi_100: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbaSummary {
    pub t: f64,
    pub replications: usize,
    pub mean_largest: f64,
    /// Normal 95% interval for the mean largest fraction.
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_oldest: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbaTrajectory {
    pub rows: Vec<AbaRow>,
    pub summaries: Vec<AbaSummary>,
}

/// Component statistics of a percolated graph: largest fraction, fraction
/// sharing the component of vertex 0 (the oldest) and the fractions in
/// components of size at most 1, 10, 100. All zero for an empty graph.
pub fn component_fractions(graph: &MarkedGraph) -> (f64, f64, [f64; 3]) {
    let n = graph.n_vertices();
    if n == 0 {
        return (0.0, 0.0, [0.0; 3]);
    }
    let rep = connected_components(graph);
    let nf = n as f64;
    let oldest = rep.component_sizes[rep.component_id[0]] as f64 / nf;
    let mut xi = [0.0; 3];
    for (slot, k) in xi.iter_mut().zip([1, 10, 100]) {
        let small: usize = rep.component_sizes.iter().filter(|&&s| s <= k).sum();
        *slot = small as f64 / nf;
    }
    (rep.largest_size as f64 / nf, oldest, xi)
}

/// Grows each replication to the last grid time, then reads off the
/// percolated graph at each grid time. Bond retention uses per-pair
/// variates, so the percolated graphs along a trajectory are nested.
pub fn giant_fraction_trajectory(
    params: &ModelParams,
    p: f64,
    t_grid: &[f64],
    replications: usize,
    seed: u64,
) -> Result<AbaTrajectory> {
    params.validate()?;
    if t_grid.is_empty() {
        return Err(Error::param("t_grid", "must be nonempty"));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || !(t_grid[0] > 0.0) {
        return Err(Error::param("t_grid", "must be positive and strictly increasing"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", format!("{p} not in [0, 1]")));
    }
    if replications == 0 {
        return Err(Error::param("replications", "must be positive"));
    }
    let t_max = *t_grid.last().unwrap();
    let mut rows = Vec::with_capacity(t_grid.len() * replications);
    for rep in 0..replications {
        let rs = seed_derivation(seed, &[rep as u64]);
        let full = grow_aba(t_max, params, rs)?;
        for &t in t_grid {
            let snap = full.snapshot(t)?;
            let g = rescale_map(&snap, t)?;
            let g = percolate_bonds(&g, p, rs)?;
            let (largest, oldest, xi) = component_fractions(&g);
            rows.push(AbaRow {
                gamma: params.gamma,
                delta: params.delta,
                beta: params.beta,
                p,
                d: params.d,
                t,
                seed: rs,
                n_vertices: g.n_vertices(),
                n_edges: g.n_edges(),
                largest_fraction: largest,
                oldest_component_fraction: oldest,
                xi_1: xi[0],
                xi_10: xi[1],
                xi_100: xi[2],
            });
        }
    }
    rows.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.seed.cmp(&b.seed)));
    let summaries = t_grid
        .iter()
        .map(|&t| {
            let xs: Vec<&AbaRow> = rows.iter().filter(|r| r.t == t).collect();
            let n = xs.len() as f64;
            let mean = xs.iter().map(|r| r.largest_fraction).sum::<f64>() / n;
            let var = if xs.len() > 1 {
                xs.iter().map(|r| (r.largest_fraction - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            let half = crate::percolation::Z95 * (var / n).sqrt();
            AbaSummary {
                t,
                replications: xs.len(),
                mean_largest: mean,
                ci_low: mean - half,
                ci_high: mean + half,
                mean_oldest: xs.iter().map(|r| r.oldest_component_fraction).sum::<f64>() / n,
            }
        })
        .collect();
    Ok(AbaTrajectory { rows, summaries })
}
