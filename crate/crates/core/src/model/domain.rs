use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainShape {
    Box,
    Torus,
}

impl DomainShape {
    pub fn name(self) -> &'static str {
        match self {
            DomainShape::Box => "box",
            DomainShape::Torus => "torus",
        }
    }
}

impl fmt::Display for DomainShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DomainShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "box" => Ok(DomainShape::Box),
            "torus" => Ok(DomainShape::Torus),
            other => Err(Error::param("domain", format!("unknown shape {other:?}"))),
        }
    }
}

/// A cube `[-L/2, L/2]^d` centred at the origin, either with the Euclidean
/// metric or with opposite faces identified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialDomain {
    pub shape: DomainShape,
    pub side: f64,
    pub dim: usize,
}

impl SpatialDomain {
    pub fn new(shape: DomainShape, side: f64, dim: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::param("d", "dimension must be at least 1"));
        }
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::param("L", format!("side {side} must be positive")));
        }
        Ok(Self { shape, side, dim })
    }

    pub fn cube(side: f64, dim: usize) -> Result<Self> {
        Self::new(DomainShape::Box, side, dim)
    }

    pub fn torus(side: f64, dim: usize) -> Result<Self> {
        Self::new(DomainShape::Torus, side, dim)
    }

    /// Torus of volume `a`, i.e. side `a^{1/d}`.
    pub fn torus_with_volume(a: f64, dim: usize) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::param("a", format!("volume {a} must be positive")));
        }
        Self::torus(a.powf(1.0 / dim.max(1) as f64), dim)
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    pub fn is_torus(&self) -> bool {
        self.shape == DomainShape::Torus
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let h = self.side / 2.0;
        x.len() == self.dim && x.iter().all(|&c| (-h..=h).contains(&c))
    }

    /// Largest possible distance between two points.
    pub fn diameter(&self) -> f64 {
        let k = (self.dim as f64).sqrt();
        match self.shape {
            DomainShape::Box => self.side * k,
            DomainShape::Torus => self.side / 2.0 * k,
        }
    }

    /// Coordinate difference `y - x`, reduced to the minimum image on a torus.
    #[inline]
    pub fn delta(&self, x: f64, y: f64) -> f64 {
        let mut t = y - x;
        if self.shape == DomainShape::Torus {
            let l = self.side;
            if t > l / 2.0 {
                t -= l;
            } else if t < -l / 2.0 {
                t += l;
            }
            // inputs outside the fundamental cell
            if t.abs() > l / 2.0 {
                t -= l * (t / l).round();
            }
        }
        t
    }

    pub fn displacement(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        x.iter().zip(y).map(|(&a, &b)| self.delta(a, b)).collect()
    }

    #[inline]
    pub fn dist_sq(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .map(|(&a, &b)| {
                let t = self.delta(a, b);
                t * t
            })
            .sum()
    }

    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        self.dist_sq(x, y).sqrt()
    }

    /// `|x - y|^d`.
    #[inline]
    pub fn dist_pow_d(&self, x: &[f64], y: &[f64]) -> f64 {
        pow_d_from_sq(self.dist_sq(x, y), self.dim)
    }

    /// Wraps a point back into the fundamental cell (identity on a box).
    pub fn wrap(&self, x: &mut [f64]) {
        if self.shape == DomainShape::Torus {
            let l = self.side;
            for c in x.iter_mut() {
                *c -= l * (*c / l).round();
            }
        }
    }
}

/// `r^d` given `r^2`.
#[inline(always)]
pub(crate) fn pow_d_from_sq(r2: f64, d: usize) -> f64 {
    match d {
        1 => r2.sqrt(),
        2 => r2,
        3 => r2 * r2.sqrt(),
        4 => r2 * r2,
        _ => r2.powf(d as f64 / 2.0),
    }
}

impl fmt::Display for SpatialDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.shape)
    }
}
