use serde::{Deserialize, Serialize};

use super::constants::sphere_constants;
use super::params::ModelParams;
use crate::error::{Error, Result};

/// Non-increasing profile functions `rho: [0, inf) -> [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProfileKind {
    /// `rho = 1` on `[0, a]`, zero beyond.
    Indicator { a: f64 },
    /// `rho(x) = min(1, (x / x0)^{-delta})`.
    Polynomial { x0: f64 },
    /// `rho(x) = min(1, p A x^{-delta})`, the profile obtained after absorbing
    /// the retention parameter into a Potter-type upper bound.
    Surgery,
}

impl ProfileKind {
    /// Indicator profile whose integral of `rho(|x|^d)` over `R^d` is one.
    pub fn normalized_indicator(d: usize) -> Self {
        ProfileKind::Indicator {
            a: d as f64 / sphere_constants(d).surface_area,
        }
    }

    /// Polynomial profile whose integral of `rho(|x|^d)` over `R^d` is one:
    /// radially, `(S_{d-1}/d) x0 delta / (delta - 1) = 1`.
    pub fn normalized_polynomial(d: usize, delta: f64) -> Self {
        ProfileKind::Polynomial {
            x0: d as f64 * (delta - 1.0) / (sphere_constants(d).surface_area * delta),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProfileKind::Indicator { .. } => "indicator",
            ProfileKind::Polynomial { .. } => "polynomial",
            ProfileKind::Surgery => "surgery",
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match *self {
            ProfileKind::Indicator { a } if !(a > 0.0 && a.is_finite()) => {
                Err(Error::param("profile.a", format!("{a} must be positive")))
            }
            ProfileKind::Polynomial { x0 } if !(x0 > 0.0 && x0.is_finite()) => {
                Err(Error::param("profile.x0", format!("{x0} must be positive")))
            }
            _ => Ok(()),
        }
    }

    /// True when `rho` vanishes beyond a finite argument.
    pub fn has_bounded_support(&self) -> bool {
        matches!(self, ProfileKind::Indicator { .. })
    }
}

/// Evaluates the profile at `x >= 0`.
pub fn profile_eval(kind: ProfileKind, x: f64, params: &ModelParams) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::param("x", format!("profile argument {x} is negative")));
    }
    Ok(FastProfile::new(kind, params).eval(x))
}

/// Profile with its constants resolved, for use inside pair loops.
#[derive(Debug, Clone, Copy)]
pub(crate) enum FastProfile {
    Indicator { a: f64 },
    Polynomial { x0: f64, delta: f64, delta_int: Option<i32> },
    Surgery { pa: f64, delta: f64, delta_int: Option<i32> },
}

fn integer_exponent(delta: f64) -> Option<i32> {
    (delta.fract() == 0.0 && delta <= 16.0).then_some(delta as i32)
}

impl FastProfile {
    pub fn new(kind: ProfileKind, params: &ModelParams) -> Self {
        let delta_int = integer_exponent(params.delta);
        match kind {
            ProfileKind::Indicator { a } => FastProfile::Indicator { a },
            ProfileKind::Polynomial { x0 } => FastProfile::Polynomial {
                x0,
                delta: params.delta,
                delta_int,
            },
            ProfileKind::Surgery => FastProfile::Surgery {
                pa: params.p * params.potter_a,
                delta: params.delta,
                delta_int,
            },
        }
    }

    #[inline(always)]
    fn neg_pow(y: f64, delta: f64, delta_int: Option<i32>) -> f64 {
        match delta_int {
            Some(k) => 1.0 / y.powi(k),
            None => y.powf(-delta),
        }
    }

    #[inline(always)]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            FastProfile::Indicator { a } => {
                if x <= a {
                    1.0
                } else {
                    0.0
                }
            }
            FastProfile::Polynomial { x0, delta, delta_int } => {
                if x <= x0 {
                    1.0
                } else {
                    Self::neg_pow(x / x0, delta, delta_int)
                }
            }
            FastProfile::Surgery { pa, delta, delta_int } => {
                if x == 0.0 {
                    return 1.0;
                }
                (pa * Self::neg_pow(x, delta, delta_int)).min(1.0)
            }
        }
    }

    /// Largest argument with `rho = 1` (the plateau), if any.
    pub fn plateau_end(&self) -> f64 {
        match *self {
            FastProfile::Indicator { a } => a,
            FastProfile::Polynomial { x0, .. } => x0,
            FastProfile::Surgery { pa, delta, .. } => pa.powf(1.0 / delta),
        }
    }
}
