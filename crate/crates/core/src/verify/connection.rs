//! Radial integral of the surgery profile and the two-step connection bound.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use super::quadrature::{iterated_chebyshev, Bound, Level, NestedIntegral};
use super::report::{rel_scale, Method, Relation, VerificationReport};
use crate::error::{Error, Result};
use crate::model::{
    i_rho_closed_form, proof_constants, sphere_constants, AngularConvention, FastProfile, KernelKind, ModelParams,
    ProfileKind, Vertex,
};
use crate::rng::stream;

pub const I_RHO_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IRhoReport {
    pub quadrature: f64,
    pub error_estimate: f64,
    pub surface: f64,
    pub paper: f64,
    /// Convention agreeing with the quadrature, if any.
    pub matches: Option<AngularConvention>,
}

fn require_surgery(params: &ModelParams) -> Result<()> {
    params.validate()?;
    if params.profile != ProfileKind::Surgery {
        return Err(Error::pre(format!(
            "needs the surgery profile, got {}",
            params.profile.name()
        )));
    }
    Ok(())
}

/// `S int_0^inf r^{d-1} rho(r^d) dr = (S / d) int_0^inf rho(v) dv`, split at
/// the end of the plateau `v*`, with the tail mapped onto `(0, 1]` by
/// `v = v* / w`.
pub fn i_rho_details(params: &ModelParams) -> Result<IRhoReport> {
    require_surgery(params)?;
    let surface = i_rho_closed_form(params, AngularConvention::Surface)?;
    let paper = i_rho_closed_form(params, AngularConvention::Paper)?;
    let rho = FastProfile::new(ProfileKind::Surgery, params);
    let radial = sphere_constants(params.d).surface_area / params.d as f64;
    let v_star = rho.plateau_end();
    let (quadrature, error_estimate) = if v_star > 0.0 {
        let core = NestedIntegral {
            constant: radial,
            levels: vec![Level::new(Bound::Fixed(0.0), Bound::Fixed(v_star), move |v: f64| rho.eval(v))],
        };
        let tail = NestedIntegral {
            constant: radial * v_star,
            levels: vec![Level::new(Bound::Fixed(0.0), Bound::Fixed(1.0), move |w: f64| {
                rho.eval(v_star / w) / w / w
            })],
        };
        let a = iterated_chebyshev(&core, 1e-13)?;
        let b = iterated_chebyshev(&tail, 1e-13)?;
        (a.value + b.value, a.error + b.error)
    } else {
        (0.0, 0.0)
    };
    let close = |v: f64| (quadrature - v).abs() <= I_RHO_TOLERANCE * rel_scale(v);
    let matches = if close(surface) {
        Some(AngularConvention::Surface)
    } else if close(paper) {
        Some(AngularConvention::Paper)
    } else {
        None
    };
    Ok(IRhoReport {
        quadrature,
        error_estimate,
        surface,
        paper,
        matches,
    })
}

/// Compares the radial quadrature of `int rho(|x|^d) dx` with the closed
/// form under the surface-measure convention; the note records the other.
pub fn verify_i_rho(params: &ModelParams) -> Result<VerificationReport> {
    let r = i_rho_details(params)?;
    let matches = match r.matches {
        Some(AngularConvention::Surface) => "surface",
        Some(AngularConvention::Paper) => "paper",
        None => "none",
    };
    let ratio = if r.paper != 0.0 { r.quadrature / r.paper } else { f64::NAN };
    Ok(VerificationReport::judge(
        "i_rho",
        format!(
            "d={};delta={};p={};A={}",
            params.d, params.delta, params.p, params.potter_a
        ),
        r.quadrature,
        r.surface,
        Relation::Eq,
        Method::Quadrature,
        I_RHO_TOLERANCE,
        r.error_estimate,
        format!("paper={};quadrature/paper={ratio};matches={matches}", r.paper),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoConnectionDetail {
    pub lhs: f64,
    pub standard_error: f64,
    /// Bound with the closed-form angular constant as written.
    pub rhs: f64,
    /// Same bound with the true surface measure.
    pub rhs_surface: f64,
    pub direct_edge: f64,
    /// Mean number of connectors adjacent to `x`.
    pub mean_connectors: f64,
    pub replications: u64,
}

fn pa(params: &ModelParams, s: f64, t: f64) -> f64 {
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    hi.powf(1.0 - params.gamma) * lo.powf(params.gamma) / params.beta
}

fn dist_pow_d(a: &[f64], b: &[f64], d: usize) -> f64 {
    let sq: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
    sq.powf(0.5 * d as f64)
}

/// `|x - y|^d` below which the distance precondition fails.
pub fn two_connection_threshold(params: &ModelParams, t: f64, s: f64) -> f64 {
    (params.p * params.potter_a).powf(1.0 / params.delta) / pa(params, t, s)
}

fn check_two_connection(params: &ModelParams, x: &Vertex, y: &Vertex) -> Result<()> {
    require_surgery(params)?;
    if params.kernel != KernelKind::Pa {
        return Err(Error::pre(format!(
            "needs the pa kernel, got {}",
            params.kernel.name()
        )));
    }
    if !params.is_subcritical_regime() {
        return Err(Error::pre(format!(
            "gamma = {} is not below delta/(delta+1)",
            params.gamma
        )));
    }
    for v in [x, y] {
        if v.position.len() != params.d {
            return Err(Error::pre(format!(
                "vertex has {} coordinates, expected {}",
                v.position.len(),
                params.d
            )));
        }
        if !(v.mark > 0.0 && v.mark <= 1.0) {
            return Err(Error::param("mark", format!("{} outside (0, 1]", v.mark)));
        }
    }
    let dist = dist_pow_d(&x.position, &y.position, params.d);
    let thr = two_connection_threshold(params, x.mark, y.mark);
    if dist < thr * (1.0 - 1e-12) {
        return Err(Error::pre(format!(
            "|x - y|^d = {dist} is below the threshold {thr}"
        )));
    }
    Ok(())
}

/// Monte Carlo estimate of the probability that some Poisson vertex younger
/// than both `x` and `y` is adjacent to both.
///
/// Connectors adjacent to `x` form a Poisson process with intensity
/// `lambda rho(g(t, u) |z - x|^d)`, which is sampled exactly (mark, then
/// radius, then direction); each is then kept with probability
/// `rho(g(s, u) |z - y|^d)`.
pub fn two_connection_detail(
    params: &ModelParams,
    x: &Vertex,
    y: &Vertex,
    replications: u64,
    seed: u64,
) -> Result<TwoConnectionDetail> {
    check_two_connection(params, x, y)?;
    if replications < 2 {
        return Err(Error::param("replications", "need at least two"));
    }
    let d = params.d;
    let (g, delta) = (params.gamma, params.delta);
    let (t, s) = (x.mark, y.mark);
    let rho = FastProfile::new(ProfileKind::Surgery, params);
    let w_star = rho.plateau_end();
    let i_surface = i_rho_closed_form(params, AngularConvention::Surface)?;
    let i_paper = i_rho_closed_form(params, AngularConvention::Paper)?;
    let m_gamma = t.max(s).powf(g);
    let mean = params.lambda * i_surface * params.beta * t.powf(-g) * (1.0 - m_gamma) / g;

    let mut rng = stream(seed);
    let poisson = if mean > 0.0 {
        Some(Poisson::new(mean).map_err(|e| Error::pre(format!("poisson mean {mean}: {e}")))?)
    } else {
        None
    };
    let plateau_share = (delta - 1.0) / delta;
    let mut dir = vec![0.0; d];
    let mut z = vec![0.0; d];
    let mut hits = 0u64;
    for _ in 0..replications {
        let n = poisson.as_ref().map_or(0, |p| p.sample(&mut rng) as u64);
        for _ in 0..n {
            let u = (m_gamma + (1.0 - m_gamma) * rng.gen::<f64>()).powf(1.0 / g);
            let u = u.min(1.0);
            let v = 1.0 - rng.gen::<f64>();
            let w = if rng.gen::<f64>() < plateau_share {
                w_star * v
            } else {
                w_star * v.powf(-1.0 / (delta - 1.0))
            };
            let r = (w / pa(params, t, u)).powf(1.0 / d as f64);
            if d == 1 {
                dir[0] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            } else {
                loop {
                    let mut norm = 0.0f64;
                    for c in dir.iter_mut() {
                        *c = StandardNormal.sample(&mut rng);
                        norm += *c * *c;
                    }
                    if norm > 0.0 {
                        let inv = 1.0 / norm.sqrt();
                        dir.iter_mut().for_each(|c| *c *= inv);
                        break;
                    }
                }
            }
            for i in 0..d {
                z[i] = x.position[i] + r * dir[i];
            }
            let q = rho.eval(pa(params, s, u) * dist_pow_d(&z, &y.position, d));
            if rng.gen::<f64>() < q {
                hits += 1;
                break;
            }
        }
    }
    let n = replications as f64;
    let lhs = hits as f64 / n;
    let standard_error = (lhs * (1.0 - lhs) / n).sqrt();
    let direct_edge = rho.eval(pa(params, t, s) * dist_pow_d(&x.position, &y.position, d));
    let c1 = proof_constants(params)?.c1;
    Ok(TwoConnectionDetail {
        lhs,
        standard_error,
        rhs: params.lambda * i_paper * c1 * direct_edge,
        rhs_surface: params.lambda * i_surface * c1 * direct_edge,
        direct_edge,
        mean_connectors: mean,
        replications,
    })
}

/// Passes when the Monte Carlo estimate is at most the bound plus two
/// standard errors.
pub fn verify_two_connection(
    params: &ModelParams,
    x: &Vertex,
    y: &Vertex,
    replications: u64,
    seed: u64,
) -> Result<VerificationReport> {
    let det = two_connection_detail(params, x, y, replications, seed)?;
    let dist = dist_pow_d(&x.position, &y.position, params.d).powf(1.0 / params.d as f64);
    Ok(VerificationReport::judge(
        "two_connection",
        format!("t={};s={};dist={dist};p={}", x.mark, y.mark, params.p),
        det.lhs,
        det.rhs,
        Relation::Le,
        Method::MonteCarlo,
        2.0 * det.standard_error / rel_scale(det.rhs),
        det.standard_error,
        format!(
            "replications={};seed={seed};direct_edge={};rhs_surface={}",
            replications, det.direct_edge, det.rhs_surface
        ),
    ))
}

/// Endpoints with uniform marks, `x` at the origin and `|x - y|^d` uniform
/// between one and four times the distance threshold.
pub fn random_admissible_configuration(params: &ModelParams, seed: u64) -> Result<(Vertex, Vertex)> {
    let mut rng = stream(seed);
    let t = 1.0 - rng.gen::<f64>();
    let s = 1.0 - rng.gen::<f64>();
    let thr = two_connection_threshold(params, t, s);
    let r = (thr * (1.0 + 3.0 * rng.gen::<f64>())).powf(1.0 / params.d as f64);
    let mut dir: Vec<f64> = (0..params.d).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
    dir.iter_mut().for_each(|c| *c *= r / norm);
    Ok((Vertex::new(vec![0.0; params.d], t)?, Vertex::new(dir, s)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surgery(d: usize, gamma: f64, delta: f64, p: f64) -> ModelParams {
        ModelParams::new(d, gamma, 1.0, delta, KernelKind::Pa, ProfileKind::Surgery)
            .unwrap()
            .with_p(p)
            .unwrap()
    }

    #[test]
    fn i_rho_examples() {
        let r = i_rho_details(&surgery(1, 0.5, 2.0, 1.0)).unwrap();
        assert!((r.quadrature - 4.0).abs() < 1e-9, "{r:?}");
        assert_eq!(r.surface, 4.0);
        assert_eq!(r.paper, 2.0);
        assert_eq!(r.matches, Some(AngularConvention::Surface));
        let rep = verify_i_rho(&surgery(1, 0.5, 2.0, 1.0)).unwrap();
        assert!(rep.pass && rep.note.contains("quadrature/paper=2"), "{rep:?}");

        let r = i_rho_details(&surgery(2, 0.5, 2.0, 1.0)).unwrap();
        assert!((r.quadrature / r.surface - 1.0).abs() < 1e-3);
        let r = i_rho_details(&surgery(3, 0.3, 2.5, 0.4).with_potter_a(2.0).unwrap()).unwrap();
        assert!((r.quadrature / r.surface - 1.0).abs() < 1e-9, "{r:?}");

        let r = i_rho_details(&surgery(2, 0.5, 2.0, 0.0)).unwrap();
        assert_eq!((r.quadrature, r.surface, r.paper), (0.0, 0.0, 0.0));
        assert!(verify_i_rho(&surgery(2, 0.5, 2.0, 0.0)).unwrap().pass);
        assert!(verify_i_rho(&ModelParams::pa_polynomial(1, 0.5, 1.0, 2.0).unwrap()).is_err());
    }

    fn pair(t: f64, s: f64, dist: f64) -> (Vertex, Vertex) {
        (Vertex::new(vec![0.0], t).unwrap(), Vertex::new(vec![dist], s).unwrap())
    }

    /// `1 - exp(-Lambda)` with `Lambda` from deterministic quadrature, `d = 1`.
    fn exact_d1(params: &ModelParams, t: f64, s: f64, dist: f64) -> f64 {
        let rho = |v: f64| {
            if v == 0.0 {
                1.0
            } else {
                (params.p * params.potter_a * v.powf(-params.delta)).min(1.0)
            }
        };
        let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize| {
            let h = (b - a) / n as f64;
            let mut acc = f(a) + f(b);
            for i in 1..n {
                acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * h / 3.0
        };
        let inner = |u: f64| {
            let (gx, gy) = (pa(params, t, u), pa(params, s, u));
            let f = |z: f64| rho(gx * z.abs()) * rho(gy * (z - dist).abs());
            // break at the plateau edges, tails via z = c / w
            let w = (params.p * params.potter_a).powf(1.0 / params.delta);
            let mut cuts = vec![-w / gx, 0.0, w / gx, dist - w / gy, dist, dist + w / gy];
            cuts.sort_by(f64::total_cmp);
            let (lo, hi) = (cuts[0] - 1.0, cuts[5] + 1.0);
            let mut acc = 0.0;
            let mut pts = vec![lo];
            pts.extend(cuts);
            pts.push(hi);
            for w in pts.windows(2) {
                acc += simpson(&f, w[0], w[1], 2000);
            }
            // right tail z = hi / q, left tail z = lo / q, q in (0, 1]
            acc += simpson(&|q: f64| if q == 0.0 { 0.0 } else { f(hi / q) * hi / (q * q) }, 0.0, 1.0, 2000);
            acc += simpson(&|q: f64| if q == 0.0 { 0.0 } else { f(lo / q) * -lo / (q * q) }, 0.0, 1.0, 2000);
            acc
        };
        let lam = params.lambda * simpson(&inner, t.max(s), 1.0, 400);
        1.0 - (-lam).exp()
    }

    #[test]
    fn sampler_matches_quadrature() {
        let params = surgery(1, 0.5, 2.0, 0.1);
        let thr = two_connection_threshold(&params, 0.3, 0.5);
        let (x, y) = pair(0.3, 0.5, 2.0 * thr);
        let det = two_connection_detail(&params, &x, &y, 200_000, 11).unwrap();
        let exact = exact_d1(&params, 0.3, 0.5, 2.0 * thr);
        assert!(
            (det.lhs - exact).abs() < 4.0 * det.standard_error,
            "{det:?} exact {exact}"
        );
    }

    #[test]
    fn worked_example_passes() {
        let params = surgery(1, 0.5, 2.0, 0.1);
        let thr = two_connection_threshold(&params, 0.3, 0.5);
        let (x, y) = pair(0.3, 0.5, 2.0 * thr);
        let r = verify_two_connection(&params, &x, &y, 100_000, 1).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r, verify_two_connection(&params, &x, &y, 100_000, 1).unwrap());
    }

    #[test]
    fn zero_retention() {
        let params = surgery(1, 0.5, 2.0, 0.0);
        let (x, y) = pair(0.3, 0.5, 1.0);
        let r = verify_two_connection(&params, &x, &y, 1000, 1).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.pass);
    }

    #[test]
    fn preconditions() {
        let params = surgery(1, 0.5, 2.0, 0.1);
        let thr = two_connection_threshold(&params, 0.3, 0.5);
        let (x, y) = pair(0.3, 0.5, 0.5 * thr);
        assert!(verify_two_connection(&params, &x, &y, 100, 1).is_err());
        let (x, y) = pair(0.3, 0.5, 2.0 * thr);
        let hot = surgery(1, 0.7, 2.0, 0.1);
        assert!(verify_two_connection(&hot, &x, &y, 100, 1).is_err());
        let poly = ModelParams::pa_polynomial(1, 0.5, 1.0, 2.0).unwrap();
        assert!(verify_two_connection(&poly, &x, &y, 100, 1).is_err());
        let other = params.clone().with_kernel(KernelKind::Min);
        assert!(verify_two_connection(&other, &x, &y, 100, 1).is_err());
    }

    #[test]
    fn higher_dimension_runs() {
        let params = surgery(2, 0.4, 2.0, 0.2);
        let (x, y) = random_admissible_configuration(&params, 4).unwrap();
        let r = verify_two_connection(&params, &x, &y, 20_000, 2).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
