use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::params::ModelParams;
use super::profile::ProfileKind;
use crate::error::{Error, Result};

/// Power-law exponent `tau = 1 + 1/gamma` of the degree distribution.
pub fn scale_free_exponent(params: &ModelParams) -> Result<f64> {
    params.validate()?;
    Ok(1.0 + 1.0 / params.gamma)
}

/// `delta / (delta + 1)`.
pub fn critical_gamma(delta: f64) -> Result<f64> {
    if !(delta > 1.0) || delta.is_nan() {
        return Err(Error::param("delta", format!("{delta} must exceed 1")));
    }
    if delta.is_infinite() {
        return Ok(1.0);
    }
    Ok(delta / (delta + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereConstants {
    /// Product of Wallis integrals `prod_{j=0}^{d-2} int_0^pi sin^j`.
    pub j_paper: f64,
    /// Surface measure of the unit sphere in `R^d`.
    pub surface_area: f64,
}

/// `int_0^pi sin^j`.
fn wallis(j: usize) -> f64 {
    match j {
        0 => PI,
        1 => 2.0,
        _ => (j as f64 - 1.0) / j as f64 * wallis(j - 2),
    }
}

pub fn sphere_constants(d: usize) -> SphereConstants {
    let j_paper = (0..d.saturating_sub(1)).map(wallis).product();
    // S(d) = 2 pi S(d-2) / (d-2)
    fn surface(d: usize) -> f64 {
        match d {
            0 => 0.0,
            1 => 2.0,
            2 => 2.0 * PI,
            _ => 2.0 * PI / (d as f64 - 2.0) * surface(d - 2),
        }
    }
    SphereConstants {
        j_paper,
        surface_area: surface(d),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngularConvention {
    /// Wallis product as written in the closed form.
    Paper,
    /// True surface measure.
    Surface,
}

/// `int_{R^d} min(1, pA |x|^{-d delta}) dx = (pA)^{1/delta} K delta / (d (delta - 1))`.
pub fn i_rho_closed_form(params: &ModelParams, convention: AngularConvention) -> Result<f64> {
    if params.profile != ProfileKind::Surgery {
        return Err(Error::pre(format!(
            "I_rho needs the surgery profile, got {}",
            params.profile.name()
        )));
    }
    let sc = sphere_constants(params.d);
    let k = match convention {
        AngularConvention::Paper => sc.j_paper,
        AngularConvention::Surface => sc.surface_area,
    };
    let d = params.d as f64;
    let delta = params.delta;
    Ok((params.p * params.potter_a).powf(1.0 / delta) * k * delta / (d * (delta - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProofConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

pub fn proof_constants(params: &ModelParams) -> Result<ProofConstants> {
    let denom = params.delta * (1.0 - params.gamma) - params.gamma;
    if !(denom > 1e-12) {
        return Err(Error::pre(format!(
            "gamma = {} is not below delta/(delta+1)",
            params.gamma
        )));
    }
    let e = params.d as f64 * params.delta;
    let c1 = params.beta * 2f64.powf(e + 1.0) / denom;
    let c2 = params.beta * 2f64.powf(e + 3.0) / denom;
    Ok(ProofConstants { c1, c2, c3: 2.0 * c2 })
}

/// Lower bound for the critical retention parameter, `None` when `p_c = 0`.
pub fn pc_lower_bound(params: &ModelParams) -> Option<f64> {
    let g = params.gamma;
    let delta = params.delta;
    if g < 0.5 {
        return Some((1.0 - 2.0 * g) / (4.0 * params.beta));
    }
    if g >= critical_gamma(delta).ok()? {
        return None;
    }
    let d = params.d as f64;
    let j = sphere_constants(params.d).j_paper;
    let num = d * (delta * (1.0 - g) - g) * (delta - 1.0);
    let den = 2f64.powf(d * delta + 4.0) * j * params.beta * delta;
    Some((num / den).powf(delta) / params.potter_a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaWindow {
    pub gamma: f64,
    pub delta: f64,
    /// Open interval for `alpha1`.
    pub alpha1_range: (f64, f64),
}

impl AlphaWindow {
    /// Open interval for `alpha2` given `alpha1`.
    pub fn alpha2_range(&self, alpha1: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.alpha1_range;
        if !(alpha1 > lo && alpha1 < hi) {
            return Err(Error::param(
                "alpha1",
                format!("{alpha1} outside ({lo}, {hi})"),
            ));
        }
        Ok((alpha1, self.gamma / self.delta * (1.0 + alpha1 * self.delta)))
    }

    /// Midpoint picks.
    pub fn default_pick(&self) -> (f64, f64) {
        let a1 = 0.5 * (self.alpha1_range.0 + self.alpha1_range.1);
        let (lo, hi) = self.alpha2_range(a1).expect("midpoint lies inside");
        (a1, 0.5 * (lo + hi))
    }

    pub fn width(&self) -> f64 {
        self.alpha1_range.1 - self.alpha1_range.0
    }

    /// True if `(alpha1, alpha2)` is an admissible pair.
    pub fn admits(&self, alpha1: f64, alpha2: f64) -> bool {
        match self.alpha2_range(alpha1) {
            Ok((lo, hi)) => alpha2 > lo && alpha2 < hi,
            Err(_) => false,
        }
    }
}

pub fn alpha_window(params: &ModelParams) -> Result<AlphaWindow> {
    let g = params.gamma;
    let delta = params.delta;
    let hi = g / (delta * (1.0 - g));
    if !(hi > 1.0) {
        return Err(Error::pre(format!(
            "gamma = {g} is not above delta/(delta+1); the alpha window is empty"
        )));
    }
    Ok(AlphaWindow {
        gamma: g,
        delta,
        alpha1_range: (1.0, hi),
    })
}
