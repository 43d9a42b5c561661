use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::graph::{MarkedGraph, RootedGraph};
use crate::error::{Error, Result};
use crate::model::{
    pow_d_from_sq, FastKernel, FastProfile, MarkPowers, ModelParams, ProfileKind, SpatialDomain,
    Vertex,
};
use crate::rng::{seed_derivation, stream, PairVariates};

/// Uniform mark in `(0, 1]`.
pub(crate) fn draw_mark<R: Rng>(rng: &mut R) -> f64 {
    1.0 - rng.gen::<f64>()
}

/// Poisson point process of intensity `lambda` on the domain with i.i.d.
/// uniform marks.
pub fn sample_ppp(domain: &SpatialDomain, params: &ModelParams, seed: u64) -> Result<Vec<Vertex>> {
    params.validate()?;
    let volume = domain.volume();
    if !(volume > 0.0 && volume.is_finite()) {
        return Err(Error::param("L", "domain volume must be positive and finite"));
    }
    let mean = params.lambda * volume;
    let mut rng = stream(seed);
    let n = Poisson::new(mean)
        .map_err(|e| Error::param("lambda", e.to_string()))?
        .sample(&mut rng) as usize;
    let h = domain.side / 2.0;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let position = (0..domain.dim).map(|_| rng.gen_range(-h..h)).collect();
        out.push(Vertex {
            position,
            mark: draw_mark(&mut rng),
        });
    }
    Ok(out)
}

/// Vertex list with the Palm root appended.
#[derive(Debug, Clone, PartialEq)]
pub struct PalmVertices {
    pub vertices: Vec<Vertex>,
    pub root_index: usize,
}

/// Appends a vertex at the origin with a fresh uniform mark.
pub fn add_palm_origin(mut vertices: Vec<Vertex>, dim: usize, seed: u64) -> PalmVertices {
    let mut rng = stream(seed);
    let root_index = vertices.len();
    vertices.push(Vertex {
        position: vec![0.0; dim],
        mark: draw_mark(&mut rng),
    });
    PalmVertices {
        vertices,
        root_index,
    }
}

/// Pairs whose variate fell below `phi`, with the variate and `phi` kept so
/// that retention at any `p` can be realized without resampling: the pair is
/// an edge at retention `p` iff `u <= p * phi`.
#[derive(Debug, Clone, Default)]
pub struct PotentialEdges {
    pub pairs: Vec<(usize, usize)>,
    pub u: Vec<f64>,
    pub phi: Vec<f64>,
}

impl PotentialEdges {
    pub fn realize(&self, p: f64) -> Vec<(usize, usize)> {
        self.pairs
            .iter()
            .zip(self.u.iter().zip(&self.phi))
            .filter(|(_, (&u, &phi))| u <= p * phi)
            .map(|(&e, _)| e)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Precomputed per-vertex data for the pair loops.
struct PairContext {
    kernel: FastKernel,
    profile: FastProfile,
    powers: Vec<MarkPowers>,
    pos: Vec<f64>,
    dim: usize,
    torus: bool,
    side: f64,
}

impl PairContext {
    fn new(vertices: &[Vertex], params: &ModelParams, domain: &SpatialDomain) -> Result<Self> {
        params.validate()?;
        if params.d != domain.dim {
            return Err(Error::param("d", "model and domain dimensions differ"));
        }
        let kernel = FastKernel::new(params);
        let mut pos = Vec::with_capacity(vertices.len() * domain.dim);
        let mut powers = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if v.position.len() != domain.dim {
                return Err(Error::malformed(format!("vertex {i} has the wrong dimension")));
            }
            if !(v.mark > 0.0 && v.mark <= 1.0) {
                return Err(Error::malformed(format!("vertex {i} has mark {}", v.mark)));
            }
            if !domain.contains(&v.position) {
                return Err(Error::malformed(format!("vertex {i} lies outside the domain")));
            }
            pos.extend_from_slice(&v.position);
            powers.push(kernel.powers(v.mark));
        }
        Ok(Self {
            kernel,
            profile: FastProfile::new(params.profile, params),
            powers,
            pos,
            dim: domain.dim,
            torus: domain.is_torus(),
            side: domain.side,
        })
    }

    fn n(&self) -> usize {
        self.powers.len()
    }

    #[inline(always)]
    fn dist_sq<const D: usize>(&self, i: usize, j: usize) -> f64 {
        let d = if D == 0 { self.dim } else { D };
        let (a, b) = (&self.pos[i * d..i * d + d], &self.pos[j * d..j * d + d]);
        let half = 0.5 * self.side;
        let mut r2 = 0.0;
        for k in 0..d {
            let mut t = b[k] - a[k];
            if self.torus {
                if t > half {
                    t -= self.side;
                } else if t < -half {
                    t += self.side;
                }
            }
            r2 += t * t;
        }
        r2
    }

    #[inline(always)]
    fn phi<const D: usize>(&self, i: usize, j: usize) -> f64 {
        let r2 = self.dist_sq::<D>(i, j);
        let d = if D == 0 { self.dim } else { D };
        let g = self.kernel.eval(&self.powers[i], &self.powers[j]);
        self.profile.eval(g * pow_d_from_sq(r2, d))
    }

    fn all_pairs<const D: usize>(&self, pv: &PairVariates, out: &mut PotentialEdges) {
        let n = self.n();
        for i in 0..n {
            let row = pv.row(i as u64);
            for j in i + 1..n {
                let phi = self.phi::<D>(i, j);
                if phi > 0.0 {
                    let u = row.at(j as u64);
                    if u <= phi {
                        out.pairs.push((i, j));
                        out.u.push(u);
                        out.phi.push(phi);
                    }
                }
            }
        }
    }

    fn dispatch_all_pairs(&self, pv: &PairVariates) -> PotentialEdges {
        let mut out = PotentialEdges::default();
        match self.dim {
            1 => self.all_pairs::<1>(pv, &mut out),
            2 => self.all_pairs::<2>(pv, &mut out),
            3 => self.all_pairs::<3>(pv, &mut out),
            _ => self.all_pairs::<0>(pv, &mut out),
        }
        out
    }

    fn phi_dyn(&self, i: usize, j: usize) -> f64 {
        match self.dim {
            1 => self.phi::<1>(i, j),
            2 => self.phi::<2>(i, j),
            3 => self.phi::<3>(i, j),
            _ => self.phi::<0>(i, j),
        }
    }
}

/// All pairs with `u <= phi`, by the exact pair loop.
pub fn potential_edges(
    vertices: &[Vertex],
    params: &ModelParams,
    domain: &SpatialDomain,
    seed: u64,
) -> Result<PotentialEdges> {
    let ctx = PairContext::new(vertices, params, domain)?;
    Ok(ctx.dispatch_all_pairs(&PairVariates::new(seed)))
}

/// Samples every pair independently: an edge is kept iff its variate is at
/// most `phi`, or at most `p * phi` when `combine_retention` is set.
pub fn build_graph_exact(
    vertices: Vec<Vertex>,
    params: &ModelParams,
    domain: &SpatialDomain,
    seed: u64,
    combine_retention: bool,
) -> Result<MarkedGraph> {
    let pot = potential_edges(&vertices, params, domain, seed)?;
    let edges = if combine_retention {
        pot.realize(params.p)
    } else {
        pot.pairs
    };
    Ok(MarkedGraph::from_sorted_unchecked(
        *domain,
        vertices,
        edges,
        seed,
        params.clone(),
    ))
}

/// Cell-list variant of [`build_graph_exact`] (without retention) for the
/// indicator profile. Uses the same pair variates, so the edge set is
/// identical.
pub fn build_graph_celllist(
    vertices: Vec<Vertex>,
    params: &ModelParams,
    domain: &SpatialDomain,
    seed: u64,
) -> Result<MarkedGraph> {
    let a = match params.profile {
        ProfileKind::Indicator { a } => a,
        other => {
            return Err(Error::pre(format!(
                "cell lists need a bounded profile, got {}",
                other.name()
            )))
        }
    };
    let ctx = PairContext::new(&vertices, params, domain)?;
    let n = ctx.n();
    let pv = PairVariates::new(seed);
    let mut edges = Vec::new();
    if n >= 2 {
        // smallest kernel value over distinct pairs sits at the two smallest marks
        let mut order: Vec<usize> = (0..n).collect();
        order.select_nth_unstable_by(1, |&x, &y| ctx.powers[x].mark.total_cmp(&ctx.powers[y].mark));
        let (m0, m1) = (order[0], order[1]);
        let gmin = ctx.kernel.eval(&ctx.powers[m0], &ctx.powers[m1]);
        let r_max = (a / gmin).powf(1.0 / ctx.dim as f64);
        let grid = CellGrid::new(domain, r_max, n);
        let cells = grid.bucket(&ctx.pos, ctx.dim);
        for c in 0..grid.n_cells() {
            if cells[c].is_empty() {
                continue;
            }
            for nb in grid.neighbors(c) {
                for &i in &cells[c] {
                    let row = pv.row(i as u64);
                    for &j in &cells[nb] {
                        if i < j {
                            let phi = ctx.phi_dyn(i, j);
                            if phi > 0.0 && row.at(j as u64) <= phi {
                                edges.push((i, j));
                            }
                        }
                    }
                }
            }
        }
        edges.sort_unstable();
    }
    Ok(MarkedGraph::from_sorted_unchecked(
        *domain,
        vertices,
        edges,
        seed,
        params.clone(),
    ))
}

/// Uniform grid over `[-L/2, L/2]^d` with cells at least `r_min` wide.
struct CellGrid {
    per_dim: usize,
    dim: usize,
    side: f64,
    torus: bool,
}

impl CellGrid {
    fn new(domain: &SpatialDomain, r_min: f64, n: usize) -> Self {
        let mut per_dim = if r_min > 0.0 && r_min.is_finite() {
            ((domain.side / r_min).floor() as usize).max(1)
        } else {
            1
        };
        // keep the cell count near the point count
        let cap = ((4 * n.max(1)) as f64).powf(1.0 / domain.dim as f64).floor() as usize;
        per_dim = per_dim.min(cap.max(1));
        Self {
            per_dim,
            dim: domain.dim,
            side: domain.side,
            torus: domain.is_torus(),
        }
    }

    fn n_cells(&self) -> usize {
        self.per_dim.pow(self.dim as u32)
    }

    fn coord(&self, x: f64) -> usize {
        let f = (x + self.side / 2.0) / self.side * self.per_dim as f64;
        (f.floor().max(0.0) as usize).min(self.per_dim - 1)
    }

    fn bucket(&self, pos: &[f64], dim: usize) -> Vec<Vec<usize>> {
        let mut cells = vec![Vec::new(); self.n_cells()];
        for (i, x) in pos.chunks_exact(dim).enumerate() {
            let mut c = 0;
            for &xk in x.iter().rev() {
                c = c * self.per_dim + self.coord(xk);
            }
            cells[c].push(i);
        }
        cells
    }

    /// Cells within one step in every coordinate (periodic on a torus),
    /// deduplicated.
    fn neighbors(&self, c: usize) -> Vec<usize> {
        let k = self.per_dim as i64;
        let mut base = Vec::with_capacity(self.dim);
        let mut rest = c;
        for _ in 0..self.dim {
            base.push((rest % self.per_dim) as i64);
            rest /= self.per_dim;
        }
        let mut out = Vec::with_capacity(3usize.pow(self.dim as u32));
        'outer: for code in 0..3usize.pow(self.dim as u32) {
            let mut rest = code;
            let mut idx = 0i64;
            let mut stride = 1i64;
            for b in &base {
                let mut x = b + (rest % 3) as i64 - 1;
                rest /= 3;
                if self.torus {
                    x = x.rem_euclid(k);
                } else if x < 0 || x >= k {
                    continue 'outer;
                }
                idx += x * stride;
                stride *= k;
            }
            out.push(idx as usize);
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Keeps each edge independently with probability `p`. The retention
/// variate of an edge depends only on `(seed, i, j)`, so the kept sets are
/// nested in `p`.
pub fn percolate_bonds(graph: &MarkedGraph, p: f64, seed: u64) -> Result<MarkedGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", format!("{p} not in [0, 1]")));
    }
    let pv = PairVariates::new(seed_derivation(seed, &[0x7265_7461_696e]));
    Ok(graph.filter_edges(|i, j| pv.uniform(i as u64, j as u64) <= p))
}

/// Sub-seeds used for one sampled instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceSeeds {
    pub vertices: u64,
    pub root: u64,
    pub edges: u64,
}

impl InstanceSeeds {
    pub fn derive(seed: u64) -> Self {
        Self {
            vertices: seed_derivation(seed, &[1]),
            root: seed_derivation(seed, &[2]),
            edges: seed_derivation(seed, &[3]),
        }
    }
}

/// Palm vertex set (points plus root) for one instance.
pub fn sample_palm_vertices(
    params: &ModelParams,
    domain: &SpatialDomain,
    seed: u64,
) -> Result<PalmVertices> {
    let s = InstanceSeeds::derive(seed);
    let pts = sample_ppp(domain, params, s.vertices)?;
    Ok(add_palm_origin(pts, domain.dim, s.root))
}

/// Palm version of the model on the domain, with edges sampled with
/// probability `p * phi` when `combine_retention` is set.
pub fn sample_rooted_graph(
    params: &ModelParams,
    domain: &SpatialDomain,
    seed: u64,
    combine_retention: bool,
) -> Result<RootedGraph> {
    let palm = sample_palm_vertices(params, domain, seed)?;
    let s = InstanceSeeds::derive(seed);
    let graph = build_graph_exact(palm.vertices, params, domain, s.edges, combine_retention)?;
    RootedGraph::new(graph, palm.root_index)
}

/// The model on the domain without a root.
pub fn sample_graph(
    params: &ModelParams,
    domain: &SpatialDomain,
    seed: u64,
    combine_retention: bool,
) -> Result<MarkedGraph> {
    let s = InstanceSeeds::derive(seed);
    let pts = sample_ppp(domain, params, s.vertices)?;
    build_graph_exact(pts, params, domain, s.edges, combine_retention)
}
