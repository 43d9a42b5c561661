use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
        })
    }
}

/// Outcome of one numerical check.
///
/// `margin` is `(rhs - lhs) / |rhs|` for inequalities and `-|lhs - rhs| / |rhs|`
/// for equalities (unscaled when `rhs = 0`); the check passes iff
/// `margin >= -tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub point: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub margin: f64,
    pub method: Method,
    pub tolerance: f64,
    pub error_estimate: f64,
    pub pass: bool,
    pub note: String,
}

pub(crate) fn rel_scale(rhs: f64) -> f64 {
    if rhs == 0.0 {
        1.0
    } else {
        rhs.abs()
    }
}

impl VerificationReport {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn judge(
        check: impl Into<String>,
        point: impl Into<String>,
        lhs: f64,
        rhs: f64,
        relation: Relation,
        method: Method,
        tolerance: f64,
        error_estimate: f64,
        note: impl Into<String>,
    ) -> Self {
        let s = rel_scale(rhs);
        let margin = match relation {
            Relation::Le => (rhs - lhs) / s,
            Relation::Eq => -(lhs - rhs).abs() / s,
        };
        Self {
            check: check.into(),
            point: point.into(),
            lhs,
            rhs,
            relation,
            margin,
            method,
            tolerance,
            error_estimate,
            pass: margin >= -tolerance,
            note: note.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn judging() {
        let r = VerificationReport::judge("x", "", 2.0, 4.0, Relation::Le, Method::Quadrature, 1e-9, 0.0, "");
        assert!(r.pass);
        assert_eq!(r.margin, 0.5);
        let r = VerificationReport::judge("x", "", 4.0 + 1e-8, 4.0, Relation::Eq, Method::Quadrature, 1e-6, 0.0, "");
        assert!(r.pass);
        let r = VerificationReport::judge("x", "", 4.1, 4.0, Relation::Le, Method::Quadrature, 1e-9, 0.0, "");
        assert!(!r.pass);
        let r = VerificationReport::judge("x", "", 0.0, 0.0, Relation::Le, Method::MonteCarlo, 0.0, 0.0, "");
        assert!(r.pass && r.margin == 0.0);
    }
}
