//! Iterated integration of nested integrals
//!
//! ```text
//! c * int_{lo_0}^{hi_0} dt_0 f_0(t_0) int_{lo_1}^{hi_1} dt_1 f_1(t_1) ... f_{L-1}(t_{L-1})
//! ```
//!
//! where each bound is a constant or the previous variable. Working from the
//! innermost level outwards, each level's running integral
//! `C_j(y) = int^{e^y} f_j(t) G_{j+1}(t) dt` is represented by piecewise
//! Chebyshev antiderivatives in `y = ln t`, and the next level reads
//! `G_{j+1}(t) = C_{j+1}(ln hi(t)) - C_{j+1}(ln lo(t))` off that
//! representation. Cost is linear in the depth.

use std::sync::{Arc, OnceLock};

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::stream;

/// Lower limits equal to zero are replaced by this value.
pub const ZERO_CUTOFF: f64 = 1e-300;

const DEG: usize = 32;
const MAX_BISECT: u32 = 48;
const INITIAL_WIDTH: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Fixed(f64),
    /// The variable of the enclosing level.
    Prev,
}

pub type Factor = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct Level {
    pub lo: Bound,
    pub hi: Bound,
    pub factor: Factor,
}

impl Level {
    pub fn new(lo: Bound, hi: Bound, factor: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            lo,
            hi,
            factor: Arc::new(factor),
        }
    }
}

impl std::fmt::Debug for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Level").field("lo", &self.lo).field("hi", &self.hi).finish()
    }
}

#[derive(Debug, Clone)]
pub struct NestedIntegral {
    pub constant: f64,
    pub levels: Vec<Level>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Absolute error estimate (quadrature) or standard error (Monte Carlo).
    pub error: f64,
    pub evaluations: u64,
}

fn resolve(b: Bound, prev: f64) -> f64 {
    let v = match b {
        Bound::Fixed(c) => c,
        Bound::Prev => prev,
    };
    v.max(ZERO_CUTOFF)
}

impl NestedIntegral {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::pre("a nested integral needs at least one level"));
        }
        for (j, l) in self.levels.iter().enumerate() {
            for b in [l.lo, l.hi] {
                match b {
                    Bound::Prev if j == 0 => {
                        return Err(Error::pre("the outermost bounds must be constants"))
                    }
                    Bound::Fixed(c) if !(c >= 0.0 && c.is_finite()) => {
                        return Err(Error::pre(format!("bound {c} must be finite and non-negative")))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Range covered by each variable.
    fn domains(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(self.depth());
        for l in &self.levels {
            let (pa, pb) = out.last().copied().unwrap_or((ZERO_CUTOFF, ZERO_CUTOFF));
            let a = match l.lo {
                Bound::Fixed(c) => c.max(ZERO_CUTOFF),
                Bound::Prev => pa,
            };
            let b = match l.hi {
                Bound::Fixed(c) => c.max(ZERO_CUTOFF),
                Bound::Prev => pb,
            };
            out.push((a, b));
        }
        out
    }
}

struct Tables {
    nodes: [f64; DEG + 1],
    cos: Vec<f64>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut nodes = [0.0; DEG + 1];
        for (k, x) in nodes.iter_mut().enumerate() {
            *x = (std::f64::consts::PI * k as f64 / DEG as f64).cos();
        }
        let mut cos = vec![0.0; (DEG + 1) * (DEG + 1)];
        for n in 0..=DEG {
            for k in 0..=DEG {
                cos[n * (DEG + 1) + k] = (std::f64::consts::PI * (n * k) as f64 / DEG as f64).cos();
            }
        }
        Tables { nodes, cos }
    })
}

fn cheb_coeffs(vals: &[f64; DEG + 1]) -> [f64; DEG + 1] {
    let t = tables();
    let mut a = [0.0; DEG + 1];
    for (n, an) in a.iter_mut().enumerate() {
        let row = &t.cos[n * (DEG + 1)..(n + 1) * (DEG + 1)];
        let mut s = 0.5 * (vals[0] * row[0] + vals[DEG] * row[DEG]);
        for k in 1..DEG {
            s += vals[k] * row[k];
        }
        *an = 2.0 * s / DEG as f64;
    }
    a[0] *= 0.5;
    a[DEG] *= 0.5;
    a
}

/// Antiderivative coefficients vanishing at `s = -1`.
fn antiderivative(a: &[f64; DEG + 1]) -> [f64; DEG + 2] {
    let get = |n: usize| if n <= DEG { a[n] } else { 0.0 };
    let mut b = [0.0; DEG + 2];
    b[1] = a[0] - 0.5 * get(2);
    for n in 2..=DEG + 1 {
        b[n] = (get(n - 1) - get(n + 1)) / (2.0 * n as f64);
    }
    let mut b0 = 0.0;
    for (n, bn) in b.iter().enumerate().skip(1) {
        b0 -= if n % 2 == 0 { *bn } else { -*bn };
    }
    b[0] = b0;
    b
}

fn clenshaw(c: &[f64], s: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * s * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    s * b1 - b2 + c[0]
}

/// Piecewise Chebyshev antiderivative on `[ya, yb]`.
#[derive(Debug, Clone)]
struct Cumulative {
    breaks: Vec<f64>,
    coeffs: Vec<[f64; DEG + 2]>,
    base: Vec<f64>,
    /// Absolute error bound on any value.
    err: f64,
    /// Largest absolute value attained.
    max_abs: f64,
}

impl Cumulative {
    fn zero(ya: f64) -> Self {
        Self {
            breaks: vec![ya, ya],
            coeffs: vec![[0.0; DEG + 2]],
            base: vec![0.0],
            err: 0.0,
            max_abs: 0.0,
        }
    }

    fn eval(&self, y: f64) -> f64 {
        let (ya, yb) = (self.breaks[0], *self.breaks.last().unwrap());
        if !(yb > ya) || y <= ya {
            return 0.0;
        }
        let y = y.min(yb);
        let p = match self.breaks.binary_search_by(|b| b.total_cmp(&y)) {
            Ok(i) => i.min(self.coeffs.len() - 1),
            Err(i) => i - 1,
        };
        let (a, b) = (self.breaks[p], self.breaks[p + 1]);
        if p + 1 < self.breaks.len() && y == b {
            return self.base[p] + 0.5 * (b - a) * clenshaw(&self.coeffs[p], 1.0);
        }
        let s = (2.0 * y - a - b) / (b - a);
        self.base[p] + 0.5 * (b - a) * clenshaw(&self.coeffs[p], s.clamp(-1.0, 1.0))
    }

    fn total(&self) -> f64 {
        self.eval(*self.breaks.last().unwrap())
    }
}

struct Builder<'a> {
    h: &'a dyn Fn(f64) -> (f64, f64),
    tol: f64,
    coarse: f64,
    span: f64,
    evals: u64,
    panels: Vec<(f64, f64, [f64; DEG + 2], f64)>,
    err: f64,
}

impl Builder<'_> {
    fn sample(&mut self, a: f64, b: f64) -> ([f64; DEG + 1], f64, f64) {
        let t = tables();
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut vals = [0.0; DEG + 1];
        let (mut scale, mut noise) = (0.0f64, 0.0f64);
        for k in 0..=DEG {
            let (v, mag) = (self.h)(mid + half * t.nodes[k]);
            vals[k] = v;
            scale = scale.max(v.abs());
            noise = noise.max(mag);
        }
        self.evals += DEG as u64 + 1;
        (vals, scale, noise)
    }

    fn panel(&mut self, a: f64, b: f64, depth: u32) -> Result<()> {
        let (vals, scale, noise) = self.sample(a, b);
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::pre(format!("integrand not finite on [{a}, {b}] (log scale)")));
        }
        let c = cheb_coeffs(&vals);
        let tail = c[DEG - 2].abs().max(c[DEG - 1].abs()).max(c[DEG].abs());
        let w = b - a;
        let ok = tail <= self.tol * scale
            || tail <= 256.0 * f64::EPSILON * noise
            || tail * w <= 1e-3 * self.tol * self.coarse * (w / self.span).min(1.0);
        if ok || depth >= MAX_BISECT || w < 1e-12 * self.span.max(1.0) {
            self.err += tail * w + 4.0 * f64::EPSILON * noise * w;
            self.panels.push((a, b, antiderivative(&c), 0.0));
            return Ok(());
        }
        let m = 0.5 * (a + b);
        self.panel(a, m, depth + 1)?;
        self.panel(m, b, depth + 1)
    }
}

/// Builds the running integral of `h(y)` over `[ya, yb]`. `h` returns a
/// value and a magnitude scale for its rounding noise.
fn cumulative(h: &dyn Fn(f64) -> (f64, f64), ya: f64, yb: f64, tol: f64) -> Result<(Cumulative, u64)> {
    if !(yb > ya) {
        return Ok((Cumulative::zero(ya.min(yb)), 0));
    }
    let n0 = ((yb - ya) / INITIAL_WIDTH).ceil().max(1.0) as usize;
    let mut b = Builder {
        h,
        tol,
        coarse: 0.0,
        span: yb - ya,
        evals: 0,
        panels: Vec::new(),
        err: 0.0,
    };
    let cuts: Vec<f64> = (0..=n0)
        .map(|i| if i == n0 { yb } else { ya + (yb - ya) * i as f64 / n0 as f64 })
        .collect();
    let mut coarse = 0.0;
    for w in cuts.windows(2) {
        let (_, scale, _) = b.sample(w[0], w[1]);
        coarse += scale * (w[1] - w[0]);
    }
    b.coarse = coarse;
    for w in cuts.windows(2) {
        b.panel(w[0], w[1], 0)?;
    }
    let mut breaks = Vec::with_capacity(b.panels.len() + 1);
    let mut coeffs = Vec::with_capacity(b.panels.len());
    let mut base = Vec::with_capacity(b.panels.len());
    let mut acc = 0.0;
    let mut max_abs = 0.0f64;
    for (a, bb, c, _) in &b.panels {
        breaks.push(*a);
        base.push(acc);
        coeffs.push(*c);
        acc += 0.5 * (bb - a) * clenshaw(c, 1.0);
        max_abs = max_abs.max(acc.abs());
    }
    breaks.push(yb);
    Ok((
        Cumulative {
            breaks,
            coeffs,
            base,
            err: b.err,
            max_abs,
        },
        b.evals,
    ))
}

/// Panel-adaptive iterated Chebyshev integration; `tol` is the relative
/// size of the discarded Chebyshev tail on each panel.
pub fn iterated_chebyshev(integral: &NestedIntegral, tol: f64) -> Result<QuadResult> {
    integral.validate()?;
    let dom = integral.domains();
    let depth = integral.depth();
    let mut inner: Option<Cumulative> = None;
    let mut evals = 0;
    for j in (0..depth).rev() {
        let (a, b) = dom[j];
        let f = integral.levels[j].factor.clone();
        let next = integral.levels.get(j + 1).map(|l| (l.lo, l.hi));
        let c_next = inner.take();
        let h = |y: f64| -> (f64, f64) {
            let t = y.exp();
            let ft = f(t) * t;
            match (&c_next, next) {
                (Some(c), Some((lo, hi))) => {
                    let (l, u) = (resolve(lo, t), resolve(hi, t));
                    let g = if u > l { c.eval(u.ln()) - c.eval(l.ln()) } else { 0.0 };
                    (ft * g, (ft * c.max_abs).abs())
                }
                _ => (ft, ft.abs()),
            }
        };
        let (mut c, n) = cumulative(&h, a.ln(), b.ln(), tol)?;
        evals += n;
        if let Some(cn) = &c_next {
            // error inherited from the inner level through int |f_j|
            let habs = |y: f64| {
                let t = y.exp();
                let v = (f(t) * t).abs();
                (v, v)
            };
            let (cabs, n2) = cumulative(&habs, a.ln(), b.ln(), 1e-6)?;
            evals += n2;
            c.err += 2.0 * cn.err * cabs.total();
        }
        inner = Some(c);
    }
    let c0 = inner.expect("depth >= 1");
    let value = integral.constant * c0.total();
    let floor = 16.0 * f64::EPSILON * (depth as f64 + 1.0) * value.abs();
    Ok(QuadResult {
        value,
        error: integral.constant.abs() * c0.err + floor,
        evaluations: evals,
    })
}

/// Monte Carlo estimate with each variable drawn log-uniformly between its
/// bounds given the previous one.
pub fn nested_monte_carlo(integral: &NestedIntegral, samples: u64, seed: u64) -> Result<QuadResult> {
    integral.validate()?;
    if samples < 2 {
        return Err(Error::param("samples", "need at least two samples"));
    }
    let mut rng = stream(seed);
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..samples {
        let mut w = 1.0;
        let mut prev = 0.0;
        for l in &integral.levels {
            let (lo, hi) = (resolve(l.lo, prev), resolve(l.hi, prev));
            if !(hi > lo) {
                w = 0.0;
                break;
            }
            let span = (hi / lo).ln();
            let t = lo * (span * rng.gen::<f64>()).exp();
            w *= (l.factor)(t) * t * span;
            prev = t;
        }
        sum += w;
        sum2 += w * w;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
    Ok(QuadResult {
        value: integral.constant * mean,
        error: integral.constant.abs() * (var / n).sqrt(),
        evaluations: samples * integral.depth() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(lo: f64, hi: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> NestedIntegral {
        NestedIntegral {
            constant: 1.0,
            levels: vec![Level::new(Bound::Fixed(lo), Bound::Fixed(hi), f)],
        }
    }

    #[test]
    fn chebyshev_pieces() {
        // antiderivative of 1 on [-1, 1] is s + 1
        let mut a = [0.0; DEG + 1];
        a[0] = 1.0;
        let b = antiderivative(&a);
        assert!((clenshaw(&b, 1.0) - 2.0).abs() < 1e-15);
        assert!(clenshaw(&b, -1.0).abs() < 1e-15);
        let vals = [3.0; DEG + 1];
        let c = cheb_coeffs(&vals);
        assert!((c[0] - 3.0).abs() < 1e-14 && c[1..].iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn one_dimensional_integrals() {
        let r = iterated_chebyshev(&one(0.0, 1.0, |t: f64| t.powf(-0.5)), 1e-13).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12, "{r:?}");
        let r = iterated_chebyshev(&one(0.25, 3.0, |t: f64| t.sin()), 1e-13).unwrap();
        let want = 0.25f64.cos() - 3f64.cos();
        assert!((r.value - want).abs() < 1e-13);
        let r = iterated_chebyshev(&one(0.0, 1.0, |t: f64| t.powf(-0.9) * (1.0 / t).ln().powi(6) / 720.0), 1e-13)
            .unwrap();
        assert!((r.value / 1e7 - 1.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn simplex_volume() {
        // int_0^1 int_0^{t0} ... 1 = 1 / n!
        for n in 1..=7 {
            let mut levels = vec![Level::new(Bound::Fixed(0.0), Bound::Fixed(1.0), |_| 1.0)];
            for _ in 1..n {
                levels.push(Level::new(Bound::Fixed(0.0), Bound::Prev, |_| 1.0));
            }
            let r = iterated_chebyshev(&NestedIntegral { constant: 1.0, levels }, 1e-13).unwrap();
            let fact: f64 = (1..=n).map(|i| i as f64).product();
            assert!((r.value * fact - 1.0).abs() < 1e-11, "n={n} {r:?}");
        }
    }

    #[test]
    fn monte_carlo_agrees() {
        let levels = vec![
            Level::new(Bound::Fixed(0.1), Bound::Fixed(1.0), |t: f64| t.powf(-0.3)),
            Level::new(Bound::Prev, Bound::Fixed(1.0), |t: f64| 1.0 / t),
            Level::new(Bound::Fixed(0.1), Bound::Prev, |t: f64| t.sqrt()),
        ];
        let ni = NestedIntegral { constant: 2.0, levels };
        let q = iterated_chebyshev(&ni, 1e-13).unwrap();
        let m = nested_monte_carlo(&ni, 200_000, 5).unwrap();
        assert!((q.value - m.value).abs() < 4.0 * m.error, "{q:?} {m:?}");
        assert_eq!(m, nested_monte_carlo(&ni, 200_000, 5).unwrap());
    }

    #[test]
    fn rejects_bad_structure() {
        let bad = NestedIntegral {
            constant: 1.0,
            levels: vec![Level::new(Bound::Prev, Bound::Fixed(1.0), |_| 1.0)],
        };
        assert!(iterated_chebyshev(&bad, 1e-12).is_err());
        let empty = NestedIntegral {
            constant: 1.0,
            levels: vec![],
        };
        assert!(iterated_chebyshev(&empty, 1e-12).is_err());
    }
}
