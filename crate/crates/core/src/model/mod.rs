//! Kernels, profiles, connection probabilities and closed-form constants.

mod constants;
mod domain;
mod kernel;
mod params;
mod profile;

pub use constants::{
    alpha_window, critical_gamma, i_rho_closed_form, pc_lower_bound, proof_constants,
    scale_free_exponent, sphere_constants, AlphaWindow, AngularConvention, ProofConstants,
    SphereConstants,
};
pub use domain::{DomainShape, SpatialDomain};
pub use kernel::{kernel_eval, KernelKind};
pub use params::ModelParams;
pub use profile::{profile_eval, ProfileKind};

pub(crate) use domain::pow_d_from_sq;
pub(crate) use kernel::{check_mark, FastKernel, MarkPowers};
pub(crate) use profile::FastProfile;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the marked point process: a position and a birth time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub position: Vec<f64>,
    /// Birth time in `(0, 1]`; the weight is its reciprocal.
    pub mark: f64,
}

impl Vertex {
    pub fn new(position: Vec<f64>, mark: f64) -> Result<Self> {
        check_mark("mark", mark)?;
        Ok(Self { position, mark })
    }
}

/// `phi(u, v) = rho(g(s, t) |x - y|^d)` using the domain metric.
///
/// The retention parameter is not included; see
/// [`crate::sampling::build_graph_exact`] for combined sampling.
pub fn connection_probability(
    u: &Vertex,
    v: &Vertex,
    params: &ModelParams,
    domain: &SpatialDomain,
) -> Result<f64> {
    if u.position.len() != domain.dim || v.position.len() != domain.dim {
        return Err(Error::param("position", "length differs from the domain dimension"));
    }
    let g = kernel_eval(params.kernel, u.mark, v.mark, params)?;
    let x = g * domain.dist_pow_d(&u.position, &v.position);
    profile_eval(params.profile, x, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surgery_pa() -> ModelParams {
        ModelParams::new(1, 0.5, 1.0, 2.0, KernelKind::Pa, ProfileKind::Surgery).unwrap()
    }

    #[test]
    fn worked_connection_values() {
        let p = surgery_pa();
        let dom = SpatialDomain::cube(100.0, 1).unwrap();
        let a = Vertex::new(vec![0.0], 0.25).unwrap();
        assert_eq!(connection_probability(&a, &a.clone(), &p, &dom).unwrap(), 1.0);
        let b = Vertex::new(vec![1.0], 0.25).unwrap();
        assert_eq!(connection_probability(&a, &b, &p, &dom).unwrap(), 1.0);
        let c = Vertex::new(vec![4.0], 0.25).unwrap();
        assert!((connection_probability(&a, &c, &p, &dom).unwrap() - 1.0).abs() < 1e-15);
        let e = Vertex::new(vec![8.0], 0.25).unwrap();
        assert!((connection_probability(&a, &e, &p, &dom).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn torus_metric_used() {
        let p = surgery_pa();
        let dom = SpatialDomain::torus(10.0, 1).unwrap();
        let a = Vertex::new(vec![-4.5], 1.0).unwrap();
        let b = Vertex::new(vec![4.5], 1.0).unwrap();
        // distance 1, g = 1, rho(1) = 1
        assert_eq!(connection_probability(&a, &b, &p, &dom).unwrap(), 1.0);
    }

    #[test]
    fn bad_mark_rejected() {
        assert!(Vertex::new(vec![0.0], 0.0).is_err());
        assert!(Vertex::new(vec![0.0], 1.0 + 1e-12).is_err());
    }

    proptest! {
        #[test]
        fn monotone_in_distance_and_marks(
            kind_ix in 0usize..4,
            prof_ix in 0usize..3,
            d in 1usize..4,
            gamma in 0.05f64..0.95,
            s in 0.01f64..1.0,
            t in 0.01f64..1.0,
            r in 0.0f64..5.0,
            dr in 0.0f64..5.0,
            shrink in 0.1f64..1.0,
        ) {
            let kind = [KernelKind::Sum, KernelKind::Min, KernelKind::Pa, KernelKind::Product][kind_ix];
            let profile = [
                ProfileKind::normalized_indicator(d),
                ProfileKind::normalized_polynomial(d, 2.5),
                ProfileKind::Surgery,
            ][prof_ix];
            let p = ModelParams::new(d, gamma, 1.0, 2.5, kind, profile).unwrap();
            let dom = SpatialDomain::cube(1000.0, d).unwrap();
            let mut xr = vec![0.0; d];
            xr[0] = r;
            let mut xf = vec![0.0; d];
            xf[0] = r + dr;
            let o = Vertex::new(vec![0.0; d], s).unwrap();
            let near = Vertex::new(xr.clone(), t).unwrap();
            let far = Vertex::new(xf, t).unwrap();
            let pn = connection_probability(&o, &near, &p, &dom).unwrap();
            let pf = connection_probability(&o, &far, &p, &dom).unwrap();
            prop_assert!(pf <= pn + 1e-15);
            let older = Vertex::new(xr, t * shrink).unwrap();
            let po = connection_probability(&o, &older, &p, &dom).unwrap();
            prop_assert!(po + 1e-15 >= pn);
            prop_assert!((0.0..=1.0).contains(&pn));
            prop_assert_eq!(pn, connection_probability(&near, &o, &p, &dom).unwrap());
        }
    }
}
