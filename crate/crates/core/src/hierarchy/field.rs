//! Point sources for the hop search: a lazily generated Poisson field on
//! `R^d x (0, 1]` and a fixed finite point set.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::model::pow_d_from_sq;
use crate::rng::{mix64, seed_derivation, stream};

/// A vertex of a point source. Ids are stable for the lifetime of the
/// source and key the per-pair edge variates.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPoint {
    pub id: u64,
    pub position: Vec<f64>,
    pub mark: f64,
}

pub trait PointSource {
    fn dim(&self) -> usize;

    /// Points with `|y - center|^d <= dist_pow_d` and mark in `[mark_lo, mark_hi]`,
    /// in a deterministic order.
    fn points_in(&mut self, center: &[f64], dist_pow_d: f64, mark_lo: f64, mark_hi: f64) -> Result<Vec<FieldPoint>>;
}

pub(crate) fn euclid_pow_d(a: &[f64], b: &[f64]) -> f64 {
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    pow_d_from_sq(sq, a.len())
}

/// Explicit point list, ids as given.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePointSet {
    dim: usize,
    points: Vec<FieldPoint>,
}

impl FinitePointSet {
    pub fn new(dim: usize, points: Vec<FieldPoint>) -> Result<Self> {
        for p in &points {
            if p.position.len() != dim {
                return Err(Error::malformed(format!("point {} has wrong dimension", p.id)));
            }
            if !(p.mark > 0.0 && p.mark <= 1.0) {
                return Err(Error::param("mark", format!("{} outside (0, 1]", p.mark)));
            }
        }
        let mut ids: Vec<u64> = points.iter().map(|p| p.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::malformed("duplicate point id"));
        }
        Ok(Self { dim, points })
    }

    pub fn points(&self) -> &[FieldPoint] {
        &self.points
    }
}

impl PointSource for FinitePointSet {
    fn dim(&self) -> usize {
        self.dim
    }

    fn points_in(&mut self, center: &[f64], dist_pow_d: f64, lo: f64, hi: f64) -> Result<Vec<FieldPoint>> {
        Ok(self
            .points
            .iter()
            .filter(|p| p.mark >= lo && p.mark <= hi && euclid_pow_d(&p.position, center) <= dist_pow_d)
            .cloned()
            .collect())
    }
}

/// Number of dyadic mark bands; the last one is `(0, 2^{-LAST_BAND}]`.
pub const LAST_BAND: u32 = 60;
/// Cells visited by one query before giving up.
pub const MAX_CELLS_PER_QUERY: u64 = 4_000_000;
/// Points returned or generated by one query before giving up.
pub const MAX_POINTS_PER_QUERY: u64 = 20_000_000;
const POINTS_PER_CELL: f64 = 32.0;
const CACHE_LIMIT: usize = 4_000_000;

fn band_range(b: u32) -> (f64, f64) {
    let hi = 0.5f64.powi(b as i32);
    if b == LAST_BAND {
        (0.0, hi)
    } else {
        (0.5 * hi, hi)
    }
}

/// Unit-rate (times `lambda`) Poisson process on `R^d x (0, 1]`, generated
/// cell by cell on demand.
///
/// Marks are split into dyadic bands `(2^{-b-1}, 2^{-b}]`; each band has its
/// own spatial grid sized for about 32 expected points per cell, so rare old
/// vertices are found in huge balls without touching the dense young bands.
/// The content of a `(band, cell)` depends only on the field seed and the
/// cell coordinates.
#[derive(Debug, Clone)]
pub struct LazyPoissonField {
    dim: usize,
    lambda: f64,
    seed: u64,
    cache: HashMap<(u32, Vec<i64>), Arc<Vec<FieldPoint>>>,
    cached_points: usize,
}

impl LazyPoissonField {
    pub fn new(dim: usize, lambda: f64, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("d", "dimension must be at least 1"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", format!("{lambda} must be positive")));
        }
        Ok(Self {
            dim,
            lambda,
            seed,
            cache: HashMap::new(),
            cached_points: 0,
        })
    }

    fn band_intensity(&self, b: u32) -> f64 {
        let (lo, hi) = band_range(b);
        self.lambda * (hi - lo)
    }

    fn cell_side(&self, b: u32) -> f64 {
        (POINTS_PER_CELL / self.band_intensity(b)).powf(1.0 / self.dim as f64)
    }

    fn cell(&mut self, b: u32, coords: &[i64]) -> Arc<Vec<FieldPoint>> {
        let key = (b, coords.to_vec());
        if let Some(c) = self.cache.get(&key) {
            return c.clone();
        }
        let side = self.cell_side(b);
        let mut labels = Vec::with_capacity(coords.len() + 1);
        labels.push(u64::from(b));
        labels.extend(coords.iter().map(|&c| c as u64));
        let cell_seed = seed_derivation(self.seed, &labels);
        let mut rng = stream(cell_seed);
        let mean = self.band_intensity(b) * side.powi(self.dim as i32);
        let n = Poisson::new(mean).map(|p| p.sample(&mut rng) as u64).unwrap_or(0);
        let (lo, hi) = band_range(b);
        let pts: Vec<FieldPoint> = (0..n)
            .map(|i| {
                let position = coords.iter().map(|&c| (c as f64 + rng.gen::<f64>()) * side).collect();
                let mark = hi - (hi - lo) * rng.gen::<f64>();
                FieldPoint {
                    id: mix64(cell_seed.wrapping_add(i)),
                    position,
                    mark,
                }
            })
            .collect();
        let pts = Arc::new(pts);
        if self.cached_points + pts.len() > CACHE_LIMIT {
            self.cache.clear();
            self.cached_points = 0;
        }
        self.cached_points += pts.len();
        self.cache.insert(key, pts.clone());
        pts
    }
}

impl PointSource for LazyPoissonField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn points_in(&mut self, center: &[f64], dist_pow_d: f64, lo: f64, hi: f64) -> Result<Vec<FieldPoint>> {
        if center.len() != self.dim {
            return Err(Error::pre("query center has the wrong dimension"));
        }
        let r = dist_pow_d.max(0.0).powf(1.0 / self.dim as f64);
        let mut out = Vec::new();
        let mut generated = 0u64;
        for b in 0..=LAST_BAND {
            let (blo, bhi) = band_range(b);
            if !(bhi >= lo && blo < hi) {
                continue;
            }
            let side = self.cell_side(b);
            let ranges: Vec<(i64, i64)> = center
                .iter()
                .map(|&c| (((c - r) / side).floor() as i64, ((c + r) / side).floor() as i64))
                .collect();
            let cells: f64 = ranges.iter().map(|(a, z)| (z - a + 1) as f64).product();
            if cells > MAX_CELLS_PER_QUERY as f64 {
                return Err(Error::WindowCap(format!(
                    "{cells} cells for radius {r} in mark band {b}"
                )));
            }
            let mut coords: Vec<i64> = ranges.iter().map(|r| r.0).collect();
            'cells: loop {
                let pts = self.cell(b, &coords);
                generated += pts.len() as u64;
                if generated > MAX_POINTS_PER_QUERY {
                    return Err(Error::WindowCap(format!("more than {MAX_POINTS_PER_QUERY} points for radius {r}")));
                }
                out.extend(
                    pts.iter()
                        .filter(|p| p.mark >= lo && p.mark <= hi && euclid_pow_d(&p.position, center) <= dist_pow_d)
                        .cloned(),
                );
                for (i, c) in coords.iter_mut().enumerate() {
                    if *c < ranges[i].1 {
                        *c += 1;
                        continue 'cells;
                    }
                    *c = ranges[i].0;
                }
                break;
            }
        }
        Ok(out)
    }
}
