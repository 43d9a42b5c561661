//! Greedy hops to ever older vertices through young connectors.
//!
//! From a vertex `(x, s)` with `s < 1/2`, a hop picks a target born before
//! `s^{alpha1}` with `|x' - x|^d < (beta / 2) s^{-alpha2}` and a connector
//! born after `1/2` with `|y - x|^d <= (beta / 2) s^{-gamma}` that is
//! adjacent to both. Edges are retained with probability `p * phi`, decided
//! by counter-based variates keyed by the two point ids.

mod field;

pub use field::{
    FieldPoint, FinitePointSet, LazyPoissonField, PointSource, LAST_BAND, MAX_CELLS_PER_QUERY, MAX_POINTS_PER_QUERY,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{alpha_window, FastKernel, FastProfile, ModelParams};
use crate::percolation::wilson_interval;
use crate::rng::{seed_derivation, PairVariates};
use field::euclid_pow_d;

/// Id of the starting vertex in [`build_chain`] and [`success_curve`].
pub const START_ID: u64 = u64::MAX;

/// Edge rule `U_{ij} <= p * rho(g |x - y|^d)`.
#[derive(Debug, Clone, Copy)]
pub struct EdgeRule {
    variates: PairVariates,
    kernel: FastKernel,
    profile: FastProfile,
    p: f64,
}

impl EdgeRule {
    pub fn new(params: &ModelParams, edge_seed: u64) -> Self {
        Self {
            variates: PairVariates::new(edge_seed),
            kernel: FastKernel::new(params),
            profile: FastProfile::new(params.profile, params),
            p: params.p,
        }
    }

    pub fn probability(&self, a: &FieldPoint, b: &FieldPoint) -> f64 {
        let g = self.kernel.eval(&self.kernel.powers(a.mark), &self.kernel.powers(b.mark));
        self.p * self.profile.eval(g * euclid_pow_d(&a.position, &b.position))
    }

    pub fn connected(&self, a: &FieldPoint, b: &FieldPoint) -> bool {
        a.id != b.id && self.variates.uniform(a.id, b.id) <= self.probability(a, b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hop {
    pub target: FieldPoint,
    pub connector: FieldPoint,
}

/// Validated `(alpha1, alpha2)`; `None` picks the window midpoints.
pub fn resolve_alphas(params: &ModelParams, alphas: Option<(f64, f64)>) -> Result<(f64, f64)> {
    let w = alpha_window(params)?;
    match alphas {
        None => Ok(w.default_pick()),
        Some((a1, a2)) if w.admits(a1, a2) => Ok((a1, a2)),
        Some((a1, a2)) => Err(Error::param(
            "alphas",
            format!("({a1}, {a2}) outside the admissible window"),
        )),
    }
}

fn nearest_first(points: &mut [FieldPoint], center: &[f64]) {
    points.sort_by(|a, b| {
        euclid_pow_d(&a.position, center)
            .total_cmp(&euclid_pow_d(&b.position, center))
            .then(a.id.cmp(&b.id))
    });
}

/// One hop from `current`, or `None` if no target is linked through a connector.
pub fn hierarchy_step(
    source: &mut dyn PointSource,
    current: &FieldPoint,
    alphas: (f64, f64),
    params: &ModelParams,
    edges: &EdgeRule,
) -> Result<Option<Hop>> {
    let s = current.mark;
    if !(s > 0.0 && s < 0.5) {
        return Err(Error::pre(format!("current mark {s} is not below 1/2")));
    }
    let (a1, a2) = alphas;
    let _ = resolve_alphas(params, Some(alphas))?;
    let half_beta = 0.5 * params.beta;
    let target_mark = s.powf(a1);
    let target_reach = half_beta * s.powf(-a2);
    let mut targets: Vec<FieldPoint> = source
        .points_in(&current.position, target_reach, 0.0, target_mark)?
        .into_iter()
        .filter(|p| p.mark < target_mark && euclid_pow_d(&p.position, &current.position) < target_reach)
        .filter(|p| p.id != current.id)
        .collect();
    if targets.is_empty() {
        return Ok(None);
    }
    nearest_first(&mut targets, &current.position);

    let conn_reach = half_beta * s.powf(-params.gamma);
    let mut connectors: Vec<FieldPoint> = source
        .points_in(&current.position, conn_reach, 0.5, 1.0)?
        .into_iter()
        .filter(|p| p.mark > 0.5 && edges.connected(current, p))
        .collect();
    nearest_first(&mut connectors, &current.position);
    for t in &targets {
        if let Some(c) = connectors.iter().find(|c| edges.connected(c, t)) {
            return Ok(Some(Hop {
                target: t.clone(),
                connector: c.clone(),
            }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// No linked target exists.
    NoHop,
    /// The search ball exceeded the window cap.
    WindowCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainFailure {
    /// One-based index of the step that failed.
    pub step: usize,
    pub kind: FailureKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyChain {
    pub start: FieldPoint,
    pub alpha1: f64,
    pub alpha2: f64,
    pub hops: Vec<Hop>,
    pub failure: Option<ChainFailure>,
    pub edge_seed: u64,
}

impl HierarchyChain {
    pub fn steps_completed(&self) -> usize {
        self.hops.len()
    }

    pub fn success(&self) -> bool {
        self.failure.is_none()
    }
}

/// Seeds of the point field and of the edge variates for one chain.
pub fn chain_seeds(seed: u64) -> (u64, u64) {
    (seed_derivation(seed, &[1]), seed_derivation(seed, &[3]))
}

/// Up to `steps` hops from `start` (which must carry [`START_ID`] or an id
/// absent from `source`).
pub fn build_chain_in(
    source: &mut dyn PointSource,
    start: FieldPoint,
    steps: usize,
    alphas: (f64, f64),
    params: &ModelParams,
    edge_seed: u64,
) -> Result<HierarchyChain> {
    let edges = EdgeRule::new(params, edge_seed);
    let mut chain = HierarchyChain {
        start: start.clone(),
        alpha1: alphas.0,
        alpha2: alphas.1,
        hops: Vec::new(),
        failure: None,
        edge_seed,
    };
    if !(start.mark > 0.0 && start.mark < 0.5) {
        return Err(Error::pre(format!("start mark {} is not below 1/2", start.mark)));
    }
    resolve_alphas(params, Some(alphas))?;
    let mut current = start;
    for k in 1..=steps {
        match hierarchy_step(source, &current, alphas, params, &edges) {
            Ok(Some(hop)) => {
                current = hop.target.clone();
                chain.hops.push(hop);
            }
            Ok(None) => {
                chain.failure = Some(ChainFailure { step: k, kind: FailureKind::NoHop });
                break;
            }
            Err(Error::WindowCap(_)) => {
                chain.failure = Some(ChainFailure {
                    step: k,
                    kind: FailureKind::WindowCap,
                });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(chain)
}

/// Chain from `(0, s0)` in a fresh lazy Poisson field on `R^d`.
pub fn build_chain(
    start_mark: f64,
    steps: usize,
    alphas: Option<(f64, f64)>,
    params: &ModelParams,
    seed: u64,
) -> Result<HierarchyChain> {
    params.validate()?;
    let alphas = resolve_alphas(params, alphas)?;
    let (field_seed, edge_seed) = chain_seeds(seed);
    let mut field = LazyPoissonField::new(params.d, params.lambda, field_seed)?;
    let start = FieldPoint {
        id: START_ID,
        position: vec![0.0; params.d],
        mark: start_mark,
    };
    build_chain_in(&mut field, start, steps, alphas, params, edge_seed)
}

/// Checks mark decay, hop length, connector age and both connector edges
/// for every hop.
pub fn check_chain(chain: &HierarchyChain, params: &ModelParams) -> Result<()> {
    let edges = EdgeRule::new(params, chain.edge_seed);
    let mut prev = &chain.start;
    for (k, hop) in chain.hops.iter().enumerate() {
        let s = prev.mark;
        let t = &hop.target;
        let fail = |what: &str| Err(Error::malformed(format!("hop {}: {what}", k + 1)));
        if !(t.mark < s.powf(chain.alpha1)) {
            return fail("target not older than s^alpha1");
        }
        if !(euclid_pow_d(&t.position, &prev.position) < 0.5 * params.beta * s.powf(-chain.alpha2)) {
            return fail("target too far");
        }
        if !(hop.connector.mark > 0.5) {
            return fail("connector born before 1/2");
        }
        if !(edges.connected(prev, &hop.connector) && edges.connected(&hop.connector, t)) {
            return fail("connector edges not present");
        }
        prev = t;
    }
    Ok(())
}

/// One replication of [`success_curve`], in the CSV layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRow {
    pub gamma: f64,
    pub delta: f64,
    pub beta: f64,
    pub p: f64,
    pub d: usize,
    pub s0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub seed: u64,
    pub steps_completed: usize,
    pub success: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessPoint {
    pub s0: f64,
    pub successes: usize,
    pub replications: usize,
    pub probability: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Replications stopped by the window cap.
    pub capped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuccessCurve {
    pub rows: Vec<ChainRow>,
    pub points: Vec<SuccessPoint>,
}

pub fn chain_replication_seed(master: u64, s0: f64, rep: u64) -> u64 {
    seed_derivation(master, &[s0.to_bits(), rep])
}

/// Empirical probability of completing `steps` hops, per start mark.
/// Every completed chain is passed through [`check_chain`].
pub fn success_curve(
    s0_list: &[f64],
    steps: usize,
    replications: usize,
    params: &ModelParams,
    alphas: Option<(f64, f64)>,
    seed: u64,
) -> Result<SuccessCurve> {
    params.validate()?;
    if s0_list.is_empty() {
        return Err(Error::param("s0_grid", "must be nonempty"));
    }
    if replications == 0 {
        return Err(Error::param("replications", "must be positive"));
    }
    let (a1, a2) = resolve_alphas(params, alphas)?;
    let mut rows = Vec::with_capacity(s0_list.len() * replications);
    let mut points = Vec::with_capacity(s0_list.len());
    for &s0 in s0_list {
        if !(s0 > 0.0 && s0 < 0.5) {
            return Err(Error::param("s0_grid", format!("{s0} not in (0, 1/2)")));
        }
        let (mut ok, mut capped) = (0, 0);
        for rep in 0..replications {
            let rs = chain_replication_seed(seed, s0, rep as u64);
            let chain = build_chain(s0, steps, Some((a1, a2)), params, rs)?;
            check_chain(&chain, params)?;
            if chain.success() {
                ok += 1;
            }
            if chain.failure.map(|f| f.kind) == Some(FailureKind::WindowCap) {
                capped += 1;
            }
            rows.push(ChainRow {
                gamma: params.gamma,
                delta: params.delta,
                beta: params.beta,
                p: params.p,
                d: params.d,
                s0,
                alpha1: a1,
                alpha2: a2,
                k: steps,
                seed: rs,
                steps_completed: chain.steps_completed(),
                success: chain.success(),
            });
        }
        let (lo, hi) = wilson_interval(ok, replications);
        points.push(SuccessPoint {
            s0,
            successes: ok,
            replications,
            probability: ok as f64 / replications as f64,
            ci_low: lo,
            ci_high: hi,
            capped,
        });
    }
    Ok(SuccessCurve { rows, points })
}
