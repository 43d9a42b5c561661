use serde::{Deserialize, Serialize};

use super::kernel::KernelKind;
use super::profile::ProfileKind;
use crate::error::{Error, Result};

/// Scalar parameters of a weight-dependent random connection model together
/// with the kernel and profile selectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Spatial dimension.
    pub d: usize,
    /// Weight-influence exponent, `0 < gamma < 1`.
    pub gamma: f64,
    /// Edge-density parameter.
    pub beta: f64,
    /// Decay index of the profile tail, `delta > 1`.
    pub delta: f64,
    /// Bond retention probability.
    pub p: f64,
    /// Potter constant used by the surgery profile.
    #[serde(rename = "A")]
    pub potter_a: f64,
    /// Intensity of the Poisson point process.
    pub lambda: f64,
    pub kernel: KernelKind,
    pub profile: ProfileKind,
}

impl ModelParams {
    /// Parameters with `p = 1`, `A = 1` and unit intensity.
    pub fn new(
        d: usize,
        gamma: f64,
        beta: f64,
        delta: f64,
        kernel: KernelKind,
        profile: ProfileKind,
    ) -> Result<Self> {
        let params = Self {
            d,
            gamma,
            beta,
            delta,
            p: 1.0,
            potter_a: 1.0,
            lambda: 1.0,
            kernel,
            profile,
        };
        params.validate()?;
        Ok(params)
    }

    /// Preferential attachment kernel with the normalized polynomial profile.
    pub fn pa_polynomial(d: usize, gamma: f64, beta: f64, delta: f64) -> Result<Self> {
        let d_ok = d.max(1);
        Self::new(
            d,
            gamma,
            beta,
            delta,
            KernelKind::Pa,
            ProfileKind::normalized_polynomial(d_ok, delta.max(1.0 + f64::EPSILON)),
        )
    }

    pub fn with_p(mut self, p: f64) -> Result<Self> {
        self.p = p;
        self.validate()?;
        Ok(self)
    }

    pub fn with_potter_a(mut self, a: f64) -> Result<Self> {
        self.potter_a = a;
        self.validate()?;
        Ok(self)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        self.lambda = lambda;
        self.validate()?;
        Ok(self)
    }

    pub fn with_kernel(mut self, kernel: KernelKind) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn with_profile(mut self, profile: ProfileKind) -> Result<Self> {
        self.profile = profile;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(Error::param("d", "dimension must be at least 1"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::param("gamma", format!("{} not in (0, 1)", self.gamma)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::param("beta", format!("{} must be positive", self.beta)));
        }
        if !(self.delta > 1.0 && self.delta.is_finite()) {
            return Err(Error::param("delta", format!("{} must exceed 1", self.delta)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::param("p", format!("{} not in [0, 1]", self.p)));
        }
        if !(self.potter_a >= 1.0 && self.potter_a.is_finite()) {
            return Err(Error::param("A", format!("{} must be at least 1", self.potter_a)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::param("lambda", format!("{} must be positive", self.lambda)));
        }
        self.profile.validate()
    }

    /// `gamma / (1 - gamma)` compared against `delta`: true when `gamma`
    /// lies strictly below the critical value `delta / (delta + 1)`.
    pub fn is_subcritical_regime(&self) -> bool {
        self.delta * (1.0 - self.gamma) - self.gamma > 0.0
    }
}
