use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::MarkedGraph;

pub const MIN_TAIL_VERTICES: usize = 10_000;
/// Distinct degree values needed in the fit window.
const MIN_POINTS: usize = 5;
/// Vertices above the window's upper end.
const TOP_EXCLUDED: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// `tau = 1 - slope`.
    pub exponent: f64,
    /// Slope of `log P(D >= k)` against `log k`.
    pub slope: f64,
    pub r_squared: f64,
    pub k_min: usize,
    pub k_max: usize,
    pub points: usize,
    /// False for degenerate windows (too few distinct degrees, or a poor
    /// linear fit).
    pub reliable: bool,
}

/// Least-squares fit of the log complementary CDF over one decade of
/// degrees, `[k_max / 10, k_max]`, where `k_max` is the degree of the
/// 31st largest vertex. The very top order statistics scatter too much
/// to anchor the window.
pub fn degree_tail_fit(graph: &MarkedGraph) -> Result<TailFit> {
    let n = graph.n_vertices();
    if n < MIN_TAIL_VERTICES {
        return Err(Error::pre(format!(
            "tail fit needs at least {MIN_TAIL_VERTICES} vertices, got {n}"
        )));
    }
    let mut deg = graph.degrees();
    deg.sort_unstable();
    let k_max = deg[n - 1 - TOP_EXCLUDED];
    let k_min = (k_max / 10).max(1);
    // P(D >= k) at each distinct degree k in the window
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut i = deg.partition_point(|&k| k < k_min);
    while i < n && deg[i] <= k_max {
        let k = deg[i];
        xs.push((k as f64).ln());
        ys.push(((n - i) as f64 / n as f64).ln());
        i = deg.partition_point(|&d| d <= k);
    }
    let m = xs.len();
    if m < 2 {
        return Ok(TailFit {
            exponent: f64::NAN,
            slope: f64::NAN,
            r_squared: 0.0,
            k_min,
            k_max,
            points: m,
            reliable: false,
        });
    }
    let mf = m as f64;
    let mx = xs.iter().sum::<f64>() / mf;
    let my = ys.iter().sum::<f64>() / mf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 0.0 };
    Ok(TailFit {
        exponent: 1.0 - slope,
        slope,
        r_squared,
        k_min,
        k_max,
        points: m,
        reliable: m >= MIN_POINTS && k_max >= 10 && r_squared >= 0.9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelParams, SpatialDomain, Vertex};

    fn from_degrees_of(n: usize, edges: Vec<(usize, usize)>) -> MarkedGraph {
        let dom = SpatialDomain::torus(1.0, 1).unwrap();
        let vs = (0..n).map(|i| Vertex::new(vec![0.0], (i + 1) as f64 / n as f64).unwrap()).collect();
        MarkedGraph::from_edges(dom, vs, edges, 0, ModelParams::pa_polynomial(1, 0.5, 1.0, 2.0).unwrap()).unwrap()
    }

    #[test]
    fn cycle_is_flagged() {
        let n = 10_000;
        let g = from_degrees_of(n, (0..n).map(|i| (i, (i + 1) % n)).collect());
        let f = degree_tail_fit(&g).unwrap();
        assert!(!f.reliable);
        assert_eq!(f.k_max, 2);
    }

    #[test]
    fn too_small() {
        let g = from_degrees_of(100, vec![]);
        assert!(degree_tail_fit(&g).is_err());
    }

    #[test]
    fn recovers_planted_power_law() {
        // star-forest: hub h has degree k_h with P(K >= k) = k^{-2}, tau = 3
        let hubs = 4000;
        let mut edges = Vec::new();
        let mut next = hubs;
        let mut sizes = Vec::new();
        for h in 0..hubs {
            let u = (h as f64 + 0.5) / hubs as f64;
            let k = (u.powf(-0.5)).floor() as usize;
            sizes.push(k);
            for _ in 0..k {
                edges.push((h, next));
                next += 1;
            }
        }
        // leaves have degree one; the fit sees the hub tail above them
        let g = from_degrees_of(next.max(MIN_TAIL_VERTICES), edges);
        let f = degree_tail_fit(&g).unwrap();
        assert!(f.reliable, "{f:?}");
        assert!((f.exponent - 3.0).abs() < 0.3, "{f:?}");
    }
}
